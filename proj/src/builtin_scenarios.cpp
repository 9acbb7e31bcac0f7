#include <map>
#include <string>
#include <vector>

#include "simhra/errors.hpp"
#include "simhra/scenario.hpp"

// Builtin scenario definitions. These are embedded copies of the ordinary
// scenario file format, so the file-based and builtin paths share one loader.
// Timelines are curated reconstructions from public accident documentation;
// see docs/scenario_format.md.

namespace simhra {

namespace {

const std::string kTmi1979 = R"json({
  "scenario_id": "tmi1979",
  "roster": [
    {
      "role_name": "Authority",
      "historical_person": "Zewe (Shift Supervisor)",
      "authority_level": "High",
      "knowledge_boundary": "Strong command of secondary-plant systems, trip response, and emergency procedure entry conditions; thin hands-on insight into pressurizer behavior under two-phase primary conditions.",
      "operational_responsibility": "Overall command of the control room: approving procedure entries, major equipment lineups, and the diagnostic picture communicated to the crew and to off-site notifications.",
      "behavioral_tendencies": "Commits early to a single system interpretation, restates it to the crew under stress, and treats readings that contradict it as instrument artifacts."
    },
    {
      "role_name": "Coordinator",
      "historical_person": "Scheimann (Control Room Operator)",
      "authority_level": "Medium",
      "knowledge_boundary": "Working knowledge of primary makeup, letdown, and relief-line instrumentation; depends on the shift supervisor for integrated plant diagnosis.",
      "operational_responsibility": "Executes board manipulations ordered from above, relays procedure steps, and filters instrument status between the supervisor and the board operator.",
      "behavioral_tendencies": "Voices doubts once and then yields; under pressure transmits the supervisor's framing downward rather than pressing his own reading."
    },
    {
      "role_name": "Operator",
      "historical_person": "Kunder (Senior Reactor Operator)",
      "authority_level": "Low",
      "knowledge_boundary": "Detailed familiarity with panel indications, pump parameters, and alarm response sheets; limited standing to reinterpret the event picture.",
      "operational_responsibility": "Direct system interface: pump starts and stops, valve lineups, logging parameters, and announcing alarm states.",
      "behavioral_tendencies": "Notices anomalies early but hedges or stays silent when the room has settled on an interpretation; complies with directives from either level above."
    }
  ],
  "temporal": {
    "total_rounds": 15,
    "minutes_per_round": 10.0,
    "onset_round": 1,
    "declared_total_minutes": 150.0
  },
  "timeline": [
    {"round": 1, "description": "04:00 — Main feedwater pumps trip; the turbine trips and the reactor scrams. Alarm annunciators light across the board.", "cue_class": "escalating"},
    {"round": 2, "description": "The pilot-operated relief valve position light indicates CLOSED after the discharge signal cleared; relief line drain pipe temperature reads high.", "cue_class": "neutral"},
    {"round": 3, "description": "Pressurizer level is rising rapidly toward the top of the indicating range; primary pressure continues to fall.", "cue_class": "neutral"},
    {"round": 4, "description": "High-pressure injection actuates automatically on low primary pressure.", "cue_class": "neutral"},
    {"round": 5, "description": "Containment sump pumps are running continuously; unexplained water accumulation in the reactor building.", "cue_class": "disconfirming"},
    {"round": 6, "description": "Primary hot-leg temperatures are climbing while primary pressure keeps falling.", "cue_class": "disconfirming"},
    {"round": 7, "description": "Sump discharge has been routed to the auxiliary building; radiation alarms sound in the auxiliary building.", "cue_class": "disconfirming"},
    {"round": 8, "description": "Reactor coolant pumps are vibrating heavily with motor current swings — a cavitation signature.", "cue_class": "disconfirming"},
    {"round": 9, "description": "B-loop reactor coolant pumps are secured on vibration limits; loop flow indication is unstable.", "cue_class": "escalating"},
    {"round": 10, "description": "A-loop reactor coolant pumps are secured; the crew assumes natural circulation is carrying decay heat.", "cue_class": "escalating"},
    {"round": 11, "description": "Hot-leg temperature reads off-scale high; incore thermocouple readings are erratic and partially off-scale.", "cue_class": "disconfirming"},
    {"round": 12, "description": "Radiation levels are rising in the containment dome; a site emergency is declared.", "cue_class": "escalating"},
    {"round": 13, "description": "The oncoming shift arrives with fresh eyes; reactor coolant drain tank discharge history is pulled for review.", "cue_class": "neutral"},
    {"round": 14, "description": "Relief line discharge temperatures never recovered after the trip — the profile matches continuous relief flow; the block valve on the pressurizer relief line is available.", "cue_class": "disconfirming"},
    {"round": 15, "description": "With the block valve shut, primary system pressure begins to recover.", "cue_class": "neutral"}
  ],
  "criteria": {
    "csr_min": 90.0,
    "ddt_rule": [100.0, 170.0],
    "ipr_rule": [25.0, 50.0],
    "fli_min": 3
  },
  "baseline": {
    "ddt": 138.0,
    "ipr": 36.0,
    "csr": 100.0,
    "fli": 3.0,
    "apc": {"presence": true, "depth": 2.0}
  },
  "drift": {
    "earliest_plausible_recovery_round": 12,
    "locked_frame_description": "the relief valve is shut and pressurizer level is high, so the primary system is full and coolant inventory is adequate",
    "frame_release_round": 13,
    "strict_hierarchy": true,
    "abandonment_keywords": ["forget the pressurizer", "we are dumping coolant"]
  }
})json";

const std::string kChernobyl1986 = R"json({
  "scenario_id": "chernobyl1986",
  "roster": [
    {
      "role_name": "Authority",
      "historical_person": "Dyatlov (Deputy Chief Engineer)",
      "authority_level": "High",
      "knowledge_boundary": "Senior reactor engineering background and ownership of the turbine rundown test programme; dismissive of operating-margin bookkeeping he regards as formality.",
      "operational_responsibility": "Directs the test sequence, overrides hold points, and decides whether the unit proceeds, recovers power, or aborts.",
      "behavioral_tendencies": "Demands progress, berates hesitation, and treats procedural objections as obstruction; under stress his pressure on subordinates intensifies."
    },
    {
      "role_name": "Coordinator",
      "historical_person": "Akimov (Shift Foreman)",
      "authority_level": "Medium",
      "knowledge_boundary": "Competent across unit operations and the shift's formal duties; less certain of reactor physics at low-power, high-void conditions.",
      "operational_responsibility": "Runs the shift: sequences the test checklist, relays the chief's instructions to the board, and owns the drum-level and feedwater lineups.",
      "behavioral_tendencies": "Caught between regulations and his superior; voices unease, then complies and passes the pressure downward."
    },
    {
      "role_name": "Operator",
      "historical_person": "Toptunov (Senior Reactor Control Engineer)",
      "authority_level": "Low",
      "knowledge_boundary": "Recently qualified on the reactor control board; knows the regulation limits on reactivity margin but has little authority to enforce them.",
      "operational_responsibility": "Hands-on rod control and power regulation; executes regulator transfers and reports margin computations.",
      "behavioral_tendencies": "Raises objections quietly and retreats when overruled; hierarchical compliance dominates under direct pressure."
    }
  ],
  "temporal": {
    "total_rounds": 12,
    "minutes_per_round": 2.0,
    "onset_round": 1,
    "declared_total_minutes": 24.0
  },
  "timeline": [
    {"round": 1, "description": "01:00 — Reactor power is held near 200 MWt for the turbine rundown test; the grid controller confirms the test window is open.", "cue_class": "neutral"},
    {"round": 2, "description": "Power has slumped far below the test level after the regulator transfer; control rods are withdrawn well beyond the normal reserve to recover.", "cue_class": "disconfirming"},
    {"round": 3, "description": "The operational reactivity margin computes below 15 effective rods — outside the test preconditions and the operating regulations.", "cue_class": "disconfirming"},
    {"round": 4, "description": "The two standby main circulation pumps are connected per the test programme; core flow rises above the design value.", "cue_class": "neutral"},
    {"round": 5, "description": "Steam drum pressure and level are falling; the associated trip signals are blocked so the test can continue.", "cue_class": "disconfirming"},
    {"round": 6, "description": "Feedwater flow is cut back sharply; core inlet temperature creeps toward saturation.", "cue_class": "neutral"},
    {"round": 7, "description": "Power is drifting upward; the automatic regulators are compensating at the edge of their range.", "cue_class": "disconfirming"},
    {"round": 8, "description": "01:22:30 — The reactivity reserve computes near 8 effective rods; regulations require immediate shutdown at this margin.", "cue_class": "disconfirming"},
    {"round": 9, "description": "01:23:04 — Turbine stop valves are closed; the rundown test begins with four main circulation pumps coasting down on the generator.", "cue_class": "escalating"},
    {"round": 10, "description": "Core coolant flow is falling as the pumps coast down; steam void fraction is rising and power is creeping upward.", "cue_class": "escalating"},
    {"round": 11, "description": "01:23:40 — Power excursion: the AZ-5 scram is pressed and the rods jam partway into the core.", "cue_class": "escalating"},
    {"round": 12, "description": "01:23:48 — Power surges beyond instrument range; fuel channel rupture indications appear across the zone.", "cue_class": "escalating"}
  ],
  "criteria": {
    "csr_min": 90.0,
    "ddt_rule": "REQUIRE_NO_RECOVERY",
    "ipr_rule": [0.0, 20.0],
    "apc_cascade_required": true
  },
  "baseline": {
    "ddt": "NO_RECOVERY",
    "ipr": 7.5,
    "csr": 100.0,
    "apc": {"presence": true, "depth": 2.0}
  },
  "drift": {
    "earliest_plausible_recovery_round": 11,
    "locked_frame_description": "the rundown test must be completed tonight and reactor behavior remains within manageable bounds",
    "frame_release_round": 11,
    "strict_hierarchy": true,
    "abandonment_keywords": ["abort the test", "emergency shutdown now"]
  }
})json";

const std::map<std::string, const std::string*>& builtin_table() {
  static const std::map<std::string, const std::string*> table = {
      {"tmi1979", &kTmi1979},
      {"chernobyl1986", &kChernobyl1986},
  };
  return table;
}

}  // namespace

std::vector<std::string> builtin_scenario_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : builtin_table()) ids.push_back(id);
  return ids;
}

bool is_builtin_scenario(const std::string& id) { return builtin_table().count(id) > 0; }

const std::string& builtin_scenario_text(const std::string& id) {
  auto it = builtin_table().find(id);
  if (it == builtin_table().end()) {
    throw NotFoundError("unknown builtin scenario: " + id);
  }
  return *it->second;
}

}  // namespace simhra
