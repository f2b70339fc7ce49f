// Message propagation and delivery rules for the DTN, Hybrid and UPN modes.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "opsim/contact.hpp"
#include "opsim/core.hpp"

namespace opsim {

// Grow-only set of node ids (N_m).
class CarrierSet {
 public:
  bool contains(NodeId id) const { return id < bits_.size() && bits_[id]; }
  // Returns true when id was not already present.
  bool insert(NodeId id);
  std::size_t size() const { return count_; }
  std::vector<NodeId> ids() const;

 private:
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

enum class MessageStatus : std::uint8_t { Live, Delivered, Expired };

struct MessageRecord {
  int id = 0;
  NodeId origin_patient = 0;
  int created_step = 0;
  int ttl_steps = 0;
  CarrierSet carriers;
  MessageStatus status = MessageStatus::Live;
  std::optional<int> delivered_step;
  // Carrier that completed the delivery (Internet uplink or D2D to destination).
  std::optional<NodeId> delivered_by;

  static MessageRecord create(int id, NodeId origin, int created_step, int ttl_steps);

  bool live() const { return status == MessageStatus::Live; }
  bool delivered() const { return status == MessageStatus::Delivered; }
};

struct RelayRules {
  RoutingMode mode = RoutingMode::Hybrid;
  CaregiverScope caregiver_scope = CaregiverScope::AnyMessage;
};

// Copies the message across one contact. DTN and Hybrid relay epidemically;
// UPN never relays. With CaregiverScope::OwnPatient a caregiver accepts only
// its linked patient's messages (needs nodes). Returns true if a carrier was
// added.
bool exchange(MessageRecord& message, const ContactEvent& event, const RelayRules& rules,
              std::span<const NodeRecord> nodes = {});

// Marks the message delivered at `step` if the mode's delivery condition holds
// given the carriers and the contacts of this step.
bool check_delivery(MessageRecord& message, std::span<const NodeRecord> nodes,
                    std::span<const ContactEvent> events_at_step, RoutingMode mode, int step);

// Marks a live message expired once step - created_step > ttl_steps.
bool expire(MessageRecord& message, int step);

// One routing step for every message: expiry, exchanges in event order, then
// delivery checks.
void route_step(std::span<MessageRecord> messages, std::span<const NodeRecord> nodes,
                std::span<const ContactEvent> events_at_step, const RelayRules& rules, int step);

}  // namespace opsim
