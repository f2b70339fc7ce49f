#include "opsim/routing.hpp"

namespace opsim {

bool CarrierSet::insert(NodeId id) {
  if (id >= bits_.size()) bits_.resize(static_cast<std::size_t>(id) + 1, false);
  if (bits_[id]) return false;
  bits_[id] = true;
  ++count_;
  return true;
}

std::vector<NodeId> CarrierSet::ids() const {
  std::vector<NodeId> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

MessageRecord MessageRecord::create(int id, NodeId origin, int created_step, int ttl_steps) {
  MessageRecord m;
  m.id = id;
  m.origin_patient = origin;
  m.created_step = created_step;
  m.ttl_steps = ttl_steps;
  m.carriers.insert(origin);
  return m;
}

namespace {

bool accepts(const MessageRecord& message, NodeId receiver, const RelayRules& rules,
             std::span<const NodeRecord> nodes) {
  if (rules.caregiver_scope == CaregiverScope::AnyMessage || receiver >= nodes.size()) return true;
  const auto& node = nodes[receiver];
  if (node.cls != NodeClass::Caregiver) return true;
  return node.linked_patient == message.origin_patient;
}

}  // namespace

bool exchange(MessageRecord& message, const ContactEvent& event, const RelayRules& rules,
              std::span<const NodeRecord> nodes) {
  if (!message.live() || rules.mode == RoutingMode::UPN) return false;
  const bool has_a = message.carriers.contains(event.node_a);
  const bool has_b = message.carriers.contains(event.node_b);
  if (has_a == has_b) return false;
  const NodeId receiver = has_a ? event.node_b : event.node_a;
  if (!accepts(message, receiver, rules, nodes)) return false;
  return message.carriers.insert(receiver);
}

bool check_delivery(MessageRecord& message, std::span<const NodeRecord> nodes,
                    std::span<const ContactEvent> events_at_step, RoutingMode mode, int step) {
  if (!message.live()) return false;

  std::optional<NodeId> via;
  auto consider = [&](NodeId n) {
    if (!via || n < *via) via = n;
  };
  auto is_destination = [&](NodeId n) { return nodes[n].cls == NodeClass::Destination; };

  if (mode == RoutingMode::UPN) {
    const NodeId origin = message.origin_patient;
    for (const auto& e : events_at_step) {
      if (!e.involves(origin)) continue;
      const NodeId peer = e.other(origin);
      if (connectivity(nodes[peer], mode) == ConnectivityState::InternetAvailable) consider(peer);
    }
  } else {
    for (const NodeId c : message.carriers.ids()) {
      if (c >= nodes.size()) continue;
      if (is_destination(c) ||
          (mode == RoutingMode::Hybrid &&
           connectivity(nodes[c], mode) == ConnectivityState::InternetAvailable)) {
        consider(c);
      }
    }
    for (const auto& e : events_at_step) {
      const bool dest_a = is_destination(e.node_a);
      const bool dest_b = is_destination(e.node_b);
      if (dest_a && message.carriers.contains(e.node_b)) consider(e.node_b);
      if (dest_b && message.carriers.contains(e.node_a)) consider(e.node_a);
    }
  }

  if (!via) return false;
  message.status = MessageStatus::Delivered;
  message.delivered_step = step;
  message.delivered_by = via;
  return true;
}

bool expire(MessageRecord& message, int step) {
  if (!message.live() || step - message.created_step <= message.ttl_steps) return false;
  message.status = MessageStatus::Expired;
  return true;
}

void route_step(std::span<MessageRecord> messages, std::span<const NodeRecord> nodes,
                std::span<const ContactEvent> events_at_step, const RelayRules& rules, int step) {
  for (auto& m : messages) {
    if (step < m.created_step) continue;
    expire(m, step);
    if (!m.live()) continue;
    for (const auto& e : events_at_step) exchange(m, e, rules, nodes);
    check_delivery(m, nodes, events_at_step, rules.mode, step);
  }
}

}  // namespace opsim
