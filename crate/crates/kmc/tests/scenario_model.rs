//! One-step behavioral invariants of the bundled surveillance scenario.
//!
//! Each test compiles the scenario with hand-picked initial values, so the
//! unique initial state *is* the configuration under test, and then inspects
//! the enabled moves of one agent or the synchronous successors of that
//! state. No reachability search is involved; the checks are instant and pin
//! down individual guard clauses rather than whole-run verdicts.

use kmc::scenario::{
    self, behavior_class, consumption_amount, generation_amount, ConsCondition, GenCondition,
    ScenarioConfig, UsvState,
};
use kmc::{parse_model, GlobalState, Model, Value};

fn sym(s: &str) -> Value {
    Value::Sym(s.to_string())
}

fn int(n: i64) -> Value {
    Value::Int(n)
}

/// Compiles the default scenario with the given `Agent.var = value`
/// overrides applied to the initial values, returning the model and its
/// single initial state. Variables not mentioned keep their shipped
/// defaults: calm traffic, healthy link, no faults, moderate weather,
/// battery full, vehicle standing by.
fn place(overrides: &[(&str, &str, Value)]) -> (Model, GlobalState) {
    let mut def = scenario::build_usv_model(&ScenarioConfig::default());
    for (agent, var, value) in overrides {
        let decl = def
            .agents
            .iter_mut()
            .find(|a| a.name == *agent)
            .unwrap_or_else(|| panic!("no agent named {agent}"))
            .vars
            .iter_mut()
            .find(|v| v.name == *var)
            .unwrap_or_else(|| panic!("no variable {agent}.{var}"));
        assert!(
            decl.domain.contains(value),
            "{agent}.{var} cannot hold {value:?}"
        );
        decl.init = value.clone();
    }
    let model = Model::compile(def).expect("scenario with overridden inits compiles");
    let mut init = model.initial_states();
    assert_eq!(init.len(), 1, "the scenario has a single initial state");
    let state = init.pop().unwrap();
    (model, state)
}

/// The post-move values rule evaluation offers for `agent.var`, in rule
/// declaration order.
fn moves_of(model: &Model, state: &GlobalState, agent: &str, var: &str) -> Vec<Value> {
    let slot = model.var_index(agent, var).expect("known variable");
    let agent_idx = model.vars()[slot].agent_idx;
    model
        .enabled_moves(agent_idx, state)
        .expect("move evaluation succeeds")
        .into_iter()
        .map(|m| {
            m.values
                .into_iter()
                .find(|(name, _)| name == var)
                .expect("moves snapshot every agent variable")
                .1
        })
        .collect()
}

/// Same as [`moves_of`] but as a sorted set (for nondeterministic agents
/// where rule order is not the point).
fn move_set(model: &Model, state: &GlobalState, agent: &str, var: &str) -> Vec<String> {
    let mut v: Vec<String> = moves_of(model, state, agent, var)
        .iter()
        .map(Value::to_string)
        .collect();
    v.sort();
    v.dedup();
    v
}

/// The sorted set of values `agent.var` takes across all synchronous
/// successors of `state`.
fn successor_values(model: &Model, state: &GlobalState, agent: &str, var: &str) -> Vec<String> {
    let slot = model.var_index(agent, var).expect("known variable");
    let mut v: Vec<String> = model
        .successors(state)
        .expect("successor evaluation succeeds")
        .iter()
        .map(|t| t.value(model, slot).to_string())
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Shorthand: the USV mode transitions offered from a placed configuration.
fn usv_moves(overrides: &[(&str, &str, Value)]) -> Vec<Value> {
    let (model, state) = place(overrides);
    moves_of(&model, &state, "USV", "state")
}

#[test]
fn collision_avoidance_returns_to_cruise_once_risk_clears() {
    // Risk gone, link healthy, no fault, charge comfortable but not full:
    // the only enabled move is back to normal cruising.
    let moves = usv_moves(&[("USV", "state", sym("CA")), ("Battery", "level", int(7))]);
    assert_eq!(moves, vec![sym("PF")]);
}

#[test]
fn surplus_power_preempts_the_return_to_cruise() {
    // Same recovery situation, but the battery is above the high-speed
    // threshold and generation exceeds draw. The priority-0 rule wins the
    // tier race outright: the vehicle upgrades to high-speed patrol instead
    // of merely resuming, which is exactly why the strict version of the
    // recovery property fails while the relaxed one holds.
    let surplus = usv_moves(&[
        ("USV", "state", sym("CA")),
        ("GenModule", "amount", int(2)),
        ("ConsModule", "amount", int(-1)),
    ]);
    assert_eq!(surplus, vec![sym("PFH")]);

    // Generation exactly matching draw is not a surplus; the preemption rule
    // stays off and the vehicle resumes normal cruising.
    let balanced = usv_moves(&[
        ("USV", "state", sym("CA")),
        ("GenModule", "amount", int(1)),
        ("ConsModule", "amount", int(-1)),
    ]);
    assert_eq!(balanced, vec![sym("PF")]);

    // A deficit likewise.
    let deficit = usv_moves(&[
        ("USV", "state", sym("CA")),
        ("GenModule", "amount", int(1)),
        ("ConsModule", "amount", int(-2)),
    ]);
    assert_eq!(deficit, vec![sym("PF")]);
}

#[test]
fn give_way_traffic_forces_collision_avoidance() {
    let moves = usv_moves(&[
        ("USV", "state", sym("PF")),
        ("AIS", "risk", sym("giveway")),
        ("Battery", "level", int(5)),
    ]);
    assert_eq!(moves, vec![sym("CA")]);

    // A severe fault outranks the avoidance manoeuvre: the avoidance guard
    // requires the detector to show anything but severe.
    let moves = usv_moves(&[
        ("USV", "state", sym("PF")),
        ("AIS", "risk", sym("giveway")),
        ("FaultDetector", "event", sym("severe")),
        ("Battery", "level", int(5)),
    ]);
    assert_eq!(moves, vec![sym("SFA")]);
}

#[test]
fn lost_link_holds_station() {
    let moves = usv_moves(&[
        ("USV", "state", sym("PF")),
        ("Communication", "signal", sym("lost")),
        ("Communication", "detected", sym("lost")),
        ("Battery", "level", int(5)),
    ]);
    assert_eq!(moves, vec![sym("SK")]);
}

#[test]
fn reserve_charge_holds_station_and_empty_charge_forces_standby() {
    // At exactly the reserve level the vehicle stops cruising and holds
    // position to recharge.
    let at_reserve = usv_moves(&[("USV", "state", sym("PF")), ("Battery", "level", int(2))]);
    assert_eq!(at_reserve, vec![sym("SK")]);

    // Below the operational floor it shuts down to standby.
    let drained = usv_moves(&[("USV", "state", sym("PF")), ("Battery", "level", int(1))]);
    assert_eq!(drained, vec![sym("SB")]);
    let drained = usv_moves(&[("USV", "state", sym("PFH")), ("Battery", "level", int(0))]);
    assert_eq!(drained, vec![sym("SB")]);
}

#[test]
fn severe_fault_aborts_and_abort_lands_in_standby() {
    let aborting = usv_moves(&[
        ("USV", "state", sym("PF")),
        ("FaultDetector", "event", sym("severe")),
        ("Battery", "level", int(5)),
    ]);
    assert_eq!(aborting, vec![sym("SFA")]);

    let aborted = usv_moves(&[("USV", "state", sym("SFA"))]);
    assert_eq!(aborted, vec![sym("SB")]);
}

#[test]
fn station_keeping_with_full_battery_resumes_at_high_speed() {
    // Holding station with a recharged battery and spare generation does not
    // resume *normal* cruising: the high-speed upgrade preempts it. This is
    // the one-step core of the failed station-keeping recovery property.
    let moves = usv_moves(&[
        ("USV", "state", sym("SK")),
        ("GenModule", "amount", int(2)),
        ("ConsModule", "amount", int(0)),
    ]);
    assert_eq!(moves, vec![sym("PFH")]);

    // With the battery merely comfortable the plain resume fires instead.
    let moves = usv_moves(&[("USV", "state", sym("SK")), ("Battery", "level", int(5))]);
    assert_eq!(moves, vec![sym("PF")]);
}

#[test]
fn cruising_races_waypoint_arrival_against_continued_patrol() {
    // Normal cruising (battery below the upgrade threshold) offers both
    // "arrive at the waypoint" and "keep patrolling" — the patrol loop is
    // deliberately nondeterministic.
    let (model, state) = place(&[("USV", "state", sym("PF")), ("Battery", "level", int(5))]);
    assert_eq!(
        move_set(&model, &state, "USV", "state"),
        vec!["AR".to_string(), "PF".to_string()]
    );
}

#[test]
fn startup_handshake_advances_one_stage_per_tick() {
    // Vehicle side: each stage waits for the ground station's matching
    // acknowledgement before advancing.
    let sb = usv_moves(&[("GCS", "state", sym("PP"))]);
    assert_eq!(sb, vec![sym("SB")], "standby holds until the station switches on");
    let sb = usv_moves(&[("GCS", "state", sym("SW"))]);
    assert_eq!(sb, vec![sym("RE")]);
    let re = usv_moves(&[("USV", "state", sym("RE")), ("GCS", "state", sym("SW"))]);
    assert_eq!(re, vec![sym("RE")], "ready holds until the link check completes");
    let re = usv_moves(&[("USV", "state", sym("RE")), ("GCS", "state", sym("LC"))]);
    assert_eq!(re, vec![sym("DP")]);
    let dp = usv_moves(&[("USV", "state", sym("DP")), ("GCS", "state", sym("LC"))]);
    assert_eq!(dp, vec![sym("PF")]);

    // Ground-station side of the same handshake.
    let (model, state) = place(&[]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("SW")]);
    let (model, state) = place(&[("USV", "state", sym("RE")), ("GCS", "state", sym("SW"))]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("LC")]);
    let (model, state) = place(&[("USV", "state", sym("PF")), ("GCS", "state", sym("LC"))]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("SiA")]);
}

#[test]
fn ground_station_stutters_when_no_rule_applies() {
    // PP only advances while the vehicle is in standby; with the vehicle
    // already cruising no rule fires and the agent keeps its value.
    let (model, state) = place(&[("USV", "state", sym("PF")), ("GCS", "state", sym("PP"))]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("PP")]);
}

#[test]
fn ground_station_handshake_resumes_supervision_after_station_keeping() {
    let (model, state) = place(&[("USV", "state", sym("SK")), ("GCS", "state", sym("SiA"))]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("PR")]);

    let (model, state) = place(&[("GCS", "state", sym("PR"))]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("SN")]);

    let (model, state) = place(&[("USV", "state", sym("PF")), ("GCS", "state", sym("SN"))]);
    assert_eq!(moves_of(&model, &state, "GCS", "state"), vec![sym("SiA")]);
}

#[test]
fn ground_station_fault_report_races_with_resume() {
    // A detected (non-severe) fault re-opens the situation-assessment page
    // in the same tier as the resume step, so both moves are offered.
    let (model, state) = place(&[
        ("GCS", "state", sym("PR")),
        ("FaultDetector", "event", sym("fault")),
    ]);
    assert_eq!(
        move_set(&model, &state, "GCS", "state"),
        vec!["SN".to_string(), "SiA".to_string()]
    );
}

#[test]
fn traffic_risk_changes_stepwise() {
    // Risk appears and disappears through the no-risk hub; it never jumps
    // directly between the two active encounter roles.
    let (model, state) = place(&[("Traffic", "risk", sym("none"))]);
    assert_eq!(
        move_set(&model, &state, "Traffic", "risk"),
        vec!["giveway".to_string(), "none".to_string(), "standon".to_string()]
    );

    let (model, state) = place(&[("Traffic", "risk", sym("giveway"))]);
    assert_eq!(
        move_set(&model, &state, "Traffic", "risk"),
        vec!["giveway".to_string(), "none".to_string()]
    );

    let (model, state) = place(&[("Traffic", "risk", sym("standon"))]);
    assert_eq!(
        move_set(&model, &state, "Traffic", "risk"),
        vec!["none".to_string(), "standon".to_string()]
    );
}

#[test]
fn sensors_report_one_tick_late() {
    // The fault detector, the AIS, and the link monitor each copy the value
    // their source held *this* tick, on every successor.
    let (model, state) = place(&[
        ("Fault", "event", sym("severe")),
        ("Traffic", "risk", sym("standon")),
        ("Communication", "signal", sym("lost")),
    ]);
    assert_eq!(successor_values(&model, &state, "FaultDetector", "event"), vec!["severe"]);
    assert_eq!(successor_values(&model, &state, "AIS", "risk"), vec!["standon"]);
    assert_eq!(successor_values(&model, &state, "Communication", "detected"), vec!["lost"]);
    // ...while the sources themselves move freely.
    assert_eq!(
        successor_values(&model, &state, "Fault", "event"),
        vec!["fault", "none", "severe"]
    );
    assert_eq!(
        successor_values(&model, &state, "Communication", "signal"),
        vec!["lost", "ok"]
    );
}

#[test]
fn battery_arithmetic_clamps_at_both_bounds() {
    // Next charge = clamp(current + generation + draw, 0, capacity); it
    // depends only on the current tick, so it is the same on every
    // successor.
    let cases: &[(i64, i64, i64, &str)] = &[
        (0, 0, -4, "0"),   // floor: already empty, still draining
        (1, 0, -4, "0"),   // floor: would go negative
        (10, 3, 0, "10"),  // ceiling: already full, still generating
        (9, 3, -1, "10"),  // ceiling: would overshoot
        (5, 1, -2, "4"),   // interior: plain arithmetic
        (2, 0, -2, "0"),   // lands exactly on the floor
        (7, 3, 0, "10"),   // lands exactly on the ceiling
    ];
    for &(level, gen, cons, expect) in cases {
        let (model, state) = place(&[
            ("Battery", "level", int(level)),
            ("GenModule", "amount", int(gen)),
            ("ConsModule", "amount", int(cons)),
        ]);
        assert_eq!(
            successor_values(&model, &state, "Battery", "level"),
            vec![expect],
            "clamp({level} + {gen} + {cons})"
        );
    }
}

#[test]
fn generation_follows_weather_and_diesel_pins_it_at_low_charge() {
    // With the battery healthy, output tracks the weather band.
    for cond in GenCondition::ALL {
        let (model, state) = place(&[
            ("Battery", "level", int(5)),
            ("GenCondition", "level", sym(cond.name())),
        ]);
        assert_eq!(
            moves_of(&model, &state, "GenModule", "amount"),
            vec![int(generation_amount(cond, false))],
            "weather {} at healthy charge",
            cond.name()
        );
    }
    // At critically low charge the diesel backup pins output at maximum
    // regardless of weather.
    for cond in GenCondition::ALL {
        for level in [0, 1] {
            let (model, state) = place(&[
                ("Battery", "level", int(level)),
                ("GenCondition", "level", sym(cond.name())),
            ]);
            assert_eq!(
                moves_of(&model, &state, "GenModule", "amount"),
                vec![int(generation_amount(cond, true))],
                "weather {} at charge {level}",
                cond.name()
            );
        }
    }
}

#[test]
fn consumption_in_the_compiled_model_matches_the_reference_table() {
    // The guarded rules of the consumption module must agree with the
    // reference table for every vehicle mode and sea state.
    for s in UsvState::ALL {
        for c in ConsCondition::ALL {
            let (model, state) = place(&[
                ("USV", "state", sym(s.name())),
                ("ConsCondition", "level", sym(c.name())),
            ]);
            let expected = consumption_amount(behavior_class(s), c);
            assert_eq!(
                moves_of(&model, &state, "ConsModule", "amount"),
                vec![int(expected)],
                "mode {} in sea state {}",
                s.name(),
                c.name()
            );
        }
    }
}

#[test]
fn bundled_model_file_matches_the_builder() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/usv_scenario.kmc");
    let text = std::fs::read_to_string(path).expect("bundled scenario file is readable");
    let parsed = parse_model(&text).expect("bundled scenario file parses");
    assert_eq!(parsed, scenario::build_usv_model(&ScenarioConfig::default()));
}
