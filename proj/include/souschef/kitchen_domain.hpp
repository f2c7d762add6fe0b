#pragma once

// Canonical kitchen domain. data/kitchen.domain ships the same text; a test
// keeps the two in sync.

#include <string_view>

namespace souschef {

inline constexpr std::string_view kKitchenDomainText = R"DOMAIN(
; Kitchen manipulation domain.
; Discrete parameters drive symbolic search; the continuous section lists the
; values the refiner must bind before an action can execute.

(domain kitchen
  (predicates
    (On movable surface :level spatial
        :gloss the result of picking up the movable then placing it on the surface)
    (In movable space :level spatial
        :gloss the movable rests inside the enclosed space)
    (Opened joint :level spatial
        :gloss the door or drawer has been opened)
    (Closed joint :level spatial
        :gloss the door or drawer has been closed)
    (TurnedOn joint :level spatial
        :gloss the knob or handle has been turned on)
    (Sprinkled movable movable :level spatial
        :gloss the first item has been sprinkled over the second)
    (Holding robot-part movable :level symbolic
        :gloss the arm is holding the movable)
    (HandEmpty robot-part :level symbolic
        :gloss the arm is holding nothing)
  )

  (alias PlaceOn On)
  (alias TurnHandle Opened)

  (action pick
    (params (?a robot-part) (?o movable) (?s surface))
    (continuous (?g grasp) (?q base-config) (?t trajectory))
    (pre (HandEmpty ?a) (On ?o ?s))
    (eff (Holding ?a ?o) (not (HandEmpty ?a)) (not (On ?o ?s)))
    (gloss it contains one argument. The robot must have an empty hand to pick up an object.))

  (action place
    (params (?a robot-part) (?o movable) (?s surface))
    (continuous (?p pose) (?q base-config) (?t trajectory))
    (pre (Holding ?a ?o))
    (eff (On ?o ?s) (HandEmpty ?a) (not (Holding ?a ?o)))
    (gloss place the held object onto a surface. The robot must already be holding the object.))

  (action pull
    (params (?a robot-part) (?o movable) (?sp space))
    (continuous (?g grasp) (?q base-config) (?t trajectory))
    (pre (HandEmpty ?a) (In ?o ?sp))
    (eff (Holding ?a ?o) (not (HandEmpty ?a)) (not (In ?o ?sp)))
    (gloss take the object out of the space that contains it. The robot must have an empty hand.))

  (action push
    (params (?a robot-part) (?o movable) (?sp space))
    (continuous (?p pose) (?q base-config) (?t trajectory))
    (pre (Holding ?a ?o))
    (eff (In ?o ?sp) (HandEmpty ?a) (not (Holding ?a ?o)))
    (gloss put the held object into an enclosed space. The robot must already be holding the object.))

  (action open
    (params (?a robot-part) (?j joint))
    (continuous (?v joint-value) (?q base-config) (?t trajectory))
    (pre (HandEmpty ?a) (Closed ?j))
    (eff (Opened ?j) (not (Closed ?j)))
    (gloss open a door or drawer. The robot must have an empty hand to open or close a joint.))

  (action close
    (params (?a robot-part) (?j joint))
    (continuous (?v joint-value) (?q base-config) (?t trajectory))
    (pre (HandEmpty ?a) (Opened ?j))
    (eff (Closed ?j) (not (Opened ?j)))
    (gloss close a door or drawer. The robot must have an empty hand to open or close a joint.))

  (action turn-on
    (params (?a robot-part) (?j joint))
    (continuous (?v joint-value) (?q base-config) (?t trajectory))
    (pre (HandEmpty ?a) (not (TurnedOn ?j)))
    (eff (TurnedOn ?j))
    (gloss turn a knob or handle on. The robot must have an empty hand.))

  (action sprinkle
    (params (?a robot-part) (?o movable) (?tgt movable))
    (continuous (?q base-config) (?t trajectory))
    (pre (Holding ?a ?o))
    (eff (Sprinkled ?o ?tgt))
    (gloss sprinkle the held shaker over the target item. The robot must be holding the shaker.))

  (action move-base
    (params)
    (continuous (?q base-config) (?t trajectory))
    (pre)
    (eff)
    (gloss drive the base to a new configuration. No symbolic effect.))
)
)DOMAIN";

}  // namespace souschef
