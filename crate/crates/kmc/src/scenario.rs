//! Bundled long-endurance surveillance scenario.
//!
//! A 12-agent model of an unmanned surface vehicle (USV) on a patrol
//! mission, its ground control station (GCS), and the environment it
//! senses: a communication channel, surrounding traffic, an on-board
//! fault process, and an energy subsystem (generation, consumption,
//! battery).  The model ships with fifteen named formulas probing the
//! handshake between vehicle and ground station, collision avoidance,
//! station keeping, and energy management.
//!
//! The builder is parameterized by [`ScenarioConfig`] so battery
//! thresholds can be explored; [`expected_verdicts`] records the
//! verdict table for the default configuration.

use std::fmt::Write as _;

use crate::model::{FormulaDef, ModelDef};
use crate::syntax::parse_model;

/// The ten control states of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UsvState {
    /// Standby at base, charging.
    Sb,
    /// Ready: mission accepted, pre-departure checks.
    Re,
    /// Departure: leaving the harbour area.
    Dp,
    /// Path following at cruise speed.
    Pf,
    /// Path following at high speed (energy surplus only).
    Pfh,
    /// Collision avoidance manoeuvre.
    Ca,
    /// Station keeping: hold position.
    Sk,
    /// Safe-state fallback after a severe fault.
    Sfa,
    /// Fully abandoned (unused by the rule set; kept in the domain).
    Fa,
    /// Arrived at the patrol goal.
    Ar,
}

impl UsvState {
    /// Every state, in domain order.
    pub const ALL: [UsvState; 10] = [
        UsvState::Sb,
        UsvState::Re,
        UsvState::Dp,
        UsvState::Pf,
        UsvState::Pfh,
        UsvState::Ca,
        UsvState::Sk,
        UsvState::Sfa,
        UsvState::Fa,
        UsvState::Ar,
    ];

    /// The symbol used for this state in the modeling language.
    pub fn name(self) -> &'static str {
        match self {
            UsvState::Sb => "SB",
            UsvState::Re => "RE",
            UsvState::Dp => "DP",
            UsvState::Pf => "PF",
            UsvState::Pfh => "PFH",
            UsvState::Ca => "CA",
            UsvState::Sk => "SK",
            UsvState::Sfa => "SFA",
            UsvState::Fa => "FA",
            UsvState::Ar => "AR",
        }
    }
}

/// Energy-consumption class of a vehicle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BehaviorClass {
    /// Low-energy-consumption behavior (station keeping).
    Lecb,
    /// Medium-energy-consumption behavior (cruise, collision avoidance).
    Mecb,
    /// High-energy-consumption behavior (high-speed path following).
    Hecb,
    /// No propulsion draw (standby, transit prep, terminal states).
    Zero,
}

/// Classifies a vehicle state by how much energy it draws.
pub fn behavior_class(state: UsvState) -> BehaviorClass {
    match state {
        UsvState::Sk => BehaviorClass::Lecb,
        UsvState::Pf | UsvState::Ca => BehaviorClass::Mecb,
        UsvState::Pfh => BehaviorClass::Hecb,
        UsvState::Sb
        | UsvState::Re
        | UsvState::Dp
        | UsvState::Sfa
        | UsvState::Fa
        | UsvState::Ar => BehaviorClass::Zero,
    }
}

/// Sea-state dependent consumption condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsCondition {
    /// Low-energy-consumption condition (calm).
    Lecc,
    /// Medium-energy-consumption condition.
    Mecc,
    /// High-energy-consumption condition (rough).
    Hecc,
}

impl ConsCondition {
    /// Every condition, in domain order.
    pub const ALL: [ConsCondition; 3] =
        [ConsCondition::Lecc, ConsCondition::Mecc, ConsCondition::Hecc];

    /// The symbol used for this condition in the modeling language.
    pub fn name(self) -> &'static str {
        match self {
            ConsCondition::Lecc => "LECC",
            ConsCondition::Mecc => "MECC",
            ConsCondition::Hecc => "HECC",
        }
    }
}

/// Weather dependent generation condition (solar/wind yield).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenCondition {
    /// Very low generation condition.
    Vlegc,
    /// Low generation condition.
    Legc,
    /// Medium generation condition.
    Megc,
    /// High generation condition.
    Hegc,
}

impl GenCondition {
    /// Every condition, in domain order.
    pub const ALL: [GenCondition; 4] = [
        GenCondition::Vlegc,
        GenCondition::Legc,
        GenCondition::Megc,
        GenCondition::Hegc,
    ];

    /// The symbol used for this condition in the modeling language.
    pub fn name(self) -> &'static str {
        match self {
            GenCondition::Vlegc => "VLEGC",
            GenCondition::Legc => "LEGC",
            GenCondition::Megc => "MEGC",
            GenCondition::Hegc => "HEGC",
        }
    }
}

/// Battery delta drawn by one tick of behavior under a sea condition.
///
/// Zero-draw behaviors consume nothing regardless of conditions; the
/// three propulsion classes step down one extra unit per condition
/// level.
pub fn consumption_amount(class: BehaviorClass, cond: ConsCondition) -> i64 {
    let column = match cond {
        ConsCondition::Lecc => 0,
        ConsCondition::Mecc => 1,
        ConsCondition::Hecc => 2,
    };
    match class {
        BehaviorClass::Zero => 0,
        BehaviorClass::Lecb => [0, -1, -2][column],
        BehaviorClass::Mecb => [-1, -2, -3][column],
        BehaviorClass::Hecb => [-2, -3, -4][column],
    }
}

/// Battery delta produced by one tick of generation.
///
/// With the diesel generator on, output is pinned at the maximum
/// regardless of conditions; otherwise it follows the weather.
pub fn generation_amount(cond: GenCondition, diesel_on: bool) -> i64 {
    if diesel_on {
        return 3;
    }
    match cond {
        GenCondition::Vlegc => 0,
        GenCondition::Legc => 1,
        GenCondition::Megc => 2,
        GenCondition::Hegc => 3,
    }
}

/// Tunable thresholds for the scenario builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioConfig {
    /// Initial battery charge.
    pub battery_init: i64,
    /// Battery capacity (domain upper bound and clamp ceiling).
    pub battery_max: i64,
    /// High-speed cruising requires strictly more charge than this.
    pub pfh_threshold: i64,
    /// Normal cruising requires strictly more charge than this;
    /// at exactly this level the vehicle holds position instead.
    pub sk_reserve: i64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            battery_init: 10,
            battery_max: 10,
            pfh_threshold: 8,
            sk_reserve: 2,
        }
    }
}

/// A rejected [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioConfigError {
    /// The thresholds must satisfy `0 <= sk_reserve < pfh_threshold <= battery_max`.
    #[error(
        "thresholds must satisfy 0 <= sk_reserve < pfh_threshold <= battery_max \
         (got sk_reserve={sk_reserve}, pfh_threshold={pfh_threshold}, battery_max={battery_max})"
    )]
    Thresholds {
        /// Rejected reserve level.
        sk_reserve: i64,
        /// Rejected high-speed threshold.
        pfh_threshold: i64,
        /// Rejected capacity.
        battery_max: i64,
    },
    /// The initial charge must lie within the battery domain.
    #[error("battery_init={battery_init} outside 0..={battery_max}")]
    Init {
        /// Rejected initial charge.
        battery_init: i64,
        /// Capacity it must not exceed.
        battery_max: i64,
    },
}

impl ScenarioConfig {
    /// Checks the config invariants:
    /// `0 <= sk_reserve < pfh_threshold <= battery_max` and
    /// `0 <= battery_init <= battery_max`.
    pub fn validate(&self) -> Result<(), ScenarioConfigError> {
        if !(0 <= self.sk_reserve
            && self.sk_reserve < self.pfh_threshold
            && self.pfh_threshold <= self.battery_max)
        {
            return Err(ScenarioConfigError::Thresholds {
                sk_reserve: self.sk_reserve,
                pfh_threshold: self.pfh_threshold,
                battery_max: self.battery_max,
            });
        }
        if !(0 <= self.battery_init && self.battery_init <= self.battery_max) {
            return Err(ScenarioConfigError::Init {
                battery_init: self.battery_init,
                battery_max: self.battery_max,
            });
        }
        Ok(())
    }
}

/// Builds the surveillance scenario as a parsed model definition.
///
/// The returned definition has 12 agents over 13 variables and carries
/// the 15 named formulas.  It validates and compiles under
/// [`Model::compile`](crate::Model::compile).
///
/// # Panics
///
/// Panics if `cfg` fails [`ScenarioConfig::validate`].
pub fn build_usv_model(cfg: &ScenarioConfig) -> ModelDef {
    cfg.validate().expect("scenario config must be valid");
    let src = scenario_source(cfg);
    parse_model(&src).expect("generated scenario text must parse")
}

/// The fifteen named formulas of the default scenario, in order.
pub fn usv_formulas() -> Vec<FormulaDef> {
    build_usv_model(&ScenarioConfig::default()).formulas
}

/// Verdict table for the default configuration, in formula order.
pub fn expected_verdicts() -> Vec<(&'static str, bool)> {
    vec![
        ("F1", true),
        ("F2", true),
        ("F3", true),
        ("F4", false),
        ("F4prime", true),
        ("F5", true),
        ("F6", true),
        ("F7", false),
        ("F8", false),
        ("F9", true),
        ("F10", true),
        ("F11", true),
        ("F12", true),
        ("F13", true),
        ("F14", true),
    ]
}

/// Renders the scenario in the modeling language.
fn scenario_source(cfg: &ScenarioConfig) -> String {
    let reserve = cfg.sk_reserve;
    let high = cfg.pfh_threshold;
    let max = cfg.battery_max;
    let mut s = String::new();

    // Environment: the channel truth plus the vehicle's one-tick-lagged
    // view of it live in one agent, so the detector update and the
    // channel's free flips happen in a single synchronized move.
    s.push_str(
        "agent Communication {\n\
         \x20 var signal : {ok, lost} init ok;\n\
         \x20 var detected : {ok, lost} init ok;\n\
         \x20 rule true -> signal := ok, detected := Communication.signal;\n\
         \x20 rule true -> signal := lost, detected := Communication.signal;\n\
         }\n\n",
    );
    // Encounter roles evolve gradually: a ship drops back to the
    // no-encounter assessment before the opposite duty can apply.
    s.push_str(
        "agent Traffic {\n\
         \x20 var risk : {none, giveway, standon} init none;\n\
         \x20 rule Traffic.risk = none -> risk := none;\n\
         \x20 rule Traffic.risk = none -> risk := giveway;\n\
         \x20 rule Traffic.risk = none -> risk := standon;\n\
         \x20 rule Traffic.risk = giveway -> risk := giveway;\n\
         \x20 rule Traffic.risk = giveway -> risk := none;\n\
         \x20 rule Traffic.risk = standon -> risk := standon;\n\
         \x20 rule Traffic.risk = standon -> risk := none;\n\
         }\n\n",
    );
    s.push_str(
        "agent AIS {\n\
         \x20 var risk : {none, giveway, standon} init none;\n\
         \x20 rule true -> risk := Traffic.risk;\n\
         }\n\n",
    );
    s.push_str(
        "agent Fault {\n\
         \x20 var event : {none, fault, severe} init none;\n\
         \x20 rule true -> event := none;\n\
         \x20 rule true -> event := fault;\n\
         \x20 rule true -> event := severe;\n\
         }\n\n",
    );
    s.push_str(
        "agent FaultDetector {\n\
         \x20 var event : {none, fault, severe} init none;\n\
         \x20 rule true -> event := Fault.event;\n\
         }\n\n",
    );

    // Weather random walks: stay or move to an adjacent level.
    s.push_str("agent GenCondition {\n  var level : {VLEGC, LEGC, MEGC, HEGC} init MEGC;\n");
    for (i, from) in GenCondition::ALL.iter().enumerate() {
        for (j, to) in GenCondition::ALL.iter().enumerate() {
            if i.abs_diff(j) <= 1 {
                let _ = writeln!(
                    s,
                    "  rule GenCondition.level = {} -> level := {};",
                    from.name(),
                    to.name()
                );
            }
        }
    }
    s.push_str("}\n\n");

    s.push_str("agent ConsCondition {\n  var level : {LECC, MECC, HECC} init LECC;\n");
    for (i, from) in ConsCondition::ALL.iter().enumerate() {
        for (j, to) in ConsCondition::ALL.iter().enumerate() {
            if i.abs_diff(j) <= 1 {
                let _ = writeln!(
                    s,
                    "  rule ConsCondition.level = {} -> level := {};",
                    from.name(),
                    to.name()
                );
            }
        }
    }
    s.push_str("}\n\n");

    // Generation module: diesel kicks in on a depleted battery and pins
    // output at maximum; otherwise output follows the weather.
    s.push_str("agent GenModule {\n  var amount : 0..3 init 2;\n");
    let _ = writeln!(
        s,
        "  rule Battery.level <= 1 -> amount := {};",
        generation_amount(GenCondition::Vlegc, true)
    );
    for cond in GenCondition::ALL {
        let _ = writeln!(
            s,
            "  rule Battery.level > 1 and GenCondition.level = {} -> amount := {};",
            cond.name(),
            generation_amount(cond, false)
        );
    }
    s.push_str("}\n\n");

    // Consumption module: draw is fixed by the vehicle's behavior class
    // and the sea condition.
    s.push_str("agent ConsModule {\n  var amount : -4..0 init 0;\n");
    let _ = writeln!(
        s,
        "  rule not in_operation -> amount := {};",
        consumption_amount(BehaviorClass::Zero, ConsCondition::Lecc)
    );
    let powered: [(&str, BehaviorClass); 3] = [
        ("USV.state = SK", BehaviorClass::Lecb),
        ("(USV.state = PF or USV.state = CA)", BehaviorClass::Mecb),
        ("USV.state = PFH", BehaviorClass::Hecb),
    ];
    for (source, class) in powered {
        for cond in ConsCondition::ALL {
            let _ = writeln!(
                s,
                "  rule {source} and ConsCondition.level = {} -> amount := {};",
                cond.name(),
                consumption_amount(class, cond)
            );
        }
    }
    s.push_str("}\n\n");

    let _ = writeln!(
        s,
        "agent Battery {{\n\
         \x20 var level : 0..{max} init {init};\n\
         \x20 rule true -> level := clamp(Battery.level + GenModule.amount + ConsModule.amount, 0, {max});\n\
         }}\n",
        init = cfg.battery_init,
    );
    s.push('\n');

    // The vehicle.  The high-speed rule sits in an earlier priority
    // tier: with a charged battery and net-positive generation it
    // preempts every normal-tier move.
    s.push_str("agent USV {\n  var state : {SB, RE, DP, PF, PFH, CA, SK, SFA, FA, AR} init SB;\n");
    let _ = writeln!(
        s,
        "  rule [prio 0] in_operation and cruising and Battery.level > {high} and surplus -> state := PFH;"
    );
    let _ = writeln!(
        s,
        "  rule USV.state = SB and GCS.state = SW and no_fault and Battery.level > {reserve} -> state := RE;"
    );
    s.push_str("  rule USV.state = RE and GCS.state = LC and no_fault -> state := DP;\n");
    s.push_str("  rule USV.state = DP and no_fault -> state := PF;\n");
    let _ = writeln!(
        s,
        "  rule USV.state = PF and cruising and Battery.level > {reserve} -> state := AR;"
    );
    let _ = writeln!(
        s,
        "  rule in_operation and cruising and Battery.level > {reserve} -> state := PF;"
    );
    s.push_str(
        "  rule in_operation and give_way and FaultDetector.event != severe and Battery.level > 1 -> state := CA;\n",
    );
    let _ = writeln!(
        s,
        "  rule in_operation and not give_way and (comm_lost and FaultDetector.event != severe \
         and Battery.level > 1 or FaultDetector.event = fault or no_fault and Battery.level = {reserve}) -> state := SK;"
    );
    s.push_str(
        "  rule (USV.state = RE or USV.state = DP or in_operation or USV.state = AR) and severe_fault -> state := SFA;\n",
    );
    s.push_str("  rule USV.state = SFA -> state := SB;\n");
    s.push_str(
        "  rule (USV.state = RE or USV.state = DP or in_operation) and Battery.level <= 1 -> state := SB;\n",
    );
    s.push_str("}\n\n");

    // The ground control station mirrors the mission phases and falls
    // back to situation awareness when a recoverable fault is reported
    // over a live channel.
    s.push_str(
        "agent GCS {\n\
         \x20 var state : {PP, SW, LC, SiA, PR, SN} init PP;\n\
         \x20 rule GCS.state = PP and USV.state = SB -> state := SW;\n\
         \x20 rule GCS.state = SW and USV.state = RE -> state := LC;\n\
         \x20 rule GCS.state = LC and USV.state = PF -> state := SiA;\n\
         \x20 rule GCS.state = SiA and USV.state = SK and comm_ok and FaultDetector.event != severe -> state := PR;\n\
         \x20 rule GCS.state = PR -> state := SN;\n\
         \x20 rule GCS.state = SN and USV.state = PF -> state := SiA;\n\
         \x20 rule FaultDetector.event = fault and comm_ok -> state := SiA;\n\
         }\n\n",
    );

    s.push_str(
        "define comm_ok := Communication.detected = ok;\n\
         define comm_lost := Communication.detected = lost;\n\
         define no_fault := FaultDetector.event = none;\n\
         define severe_fault := FaultDetector.event = severe;\n\
         define give_way := AIS.risk = giveway;\n\
         define in_operation := USV.state = PF or USV.state = PFH or USV.state = CA or USV.state = SK;\n\
         define cruising := not give_way and comm_ok and no_fault;\n\
         define surplus := GenModule.amount > -ConsModule.amount;\n\n",
    );

    let _ = writeln!(
        s,
        "formula F1 := AG(USV.state = RE and comm_ok and no_fault and GCS.state = LC \
         and Battery.level > {reserve} -> AX(USV.state = DP));"
    );
    let _ = writeln!(
        s,
        "formula F2 := AG(USV.state = PF and no_fault and Battery.level > {reserve} \
         and give_way -> AX(USV.state = CA));"
    );
    s.push_str("formula F3 := AG(not give_way -> AX(USV.state != CA));\n");
    let _ = writeln!(
        s,
        "formula F4 := AG(USV.state = CA and comm_ok and AIS.risk = none and no_fault \
         and Battery.level > {reserve} -> AX(USV.state = PF));"
    );
    let _ = writeln!(
        s,
        "formula F4prime := AG(USV.state = CA and comm_ok and AIS.risk = none and no_fault \
         and Battery.level > {reserve} -> AX(USV.state = PF or USV.state = PFH));"
    );
    s.push_str(
        "formula F5 := AG(USV.state = SK and no_fault and GCS.state = SiA and comm_ok -> AX(GCS.state = PR));\n",
    );
    let _ = writeln!(
        s,
        "formula F6 := AG(USV.state = PF and AIS.risk = none and no_fault \
         and Battery.level > {reserve} and comm_lost -> AX(USV.state = SK));"
    );
    let _ = writeln!(
        s,
        "formula F7 := AG(USV.state = SK and comm_ok and Battery.level > {reserve} \
         and GCS.state = SN -> AX(USV.state = PF));"
    );
    s.push_str("formula F8 := AG(USV.state = PF and no_fault and comm_lost -> AX(USV.state = SK));\n");
    let _ = writeln!(
        s,
        "formula F9 := AG(comm_ok and Battery.level >= {} and no_fault -> AX(USV.state != SK));",
        reserve + 1
    );
    s.push_str(
        "formula F10 := AG(comm_lost and not give_way and (USV.state = PF or USV.state = PFH or USV.state = SK) \
         -> AX(USV.state = SK or USV.state = SB or USV.state = SFA));\n",
    );
    s.push_str("formula F11 := AG(USV.state = SFA -> AX(USV.state = SB));\n");
    s.push_str("formula F12 := AG(Battery.level < 2 -> AX(USV.state != PF and USV.state != PFH));\n");
    let _ = writeln!(
        s,
        "formula F13 := AG((USV.state = PF or USV.state = CA) and Battery.level = {} \
         and GenModule.amount = 3 and ConsModule.amount >= -1 and not give_way and no_fault \
         and comm_ok -> AX(USV.state = PFH));",
        high + 1
    );
    let _ = writeln!(s, "formula F14 := AG(Battery.level <= {high} -> AX(USV.state != PFH));");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;
    use crate::syntax::format_model;

    #[test]
    fn consumption_table_is_exact() {
        use BehaviorClass::*;
        use ConsCondition::*;
        let cells = [
            (Lecb, Lecc, 0),
            (Lecb, Mecc, -1),
            (Lecb, Hecc, -2),
            (Mecb, Lecc, -1),
            (Mecb, Mecc, -2),
            (Mecb, Hecc, -3),
            (Hecb, Lecc, -2),
            (Hecb, Mecc, -3),
            (Hecb, Hecc, -4),
        ];
        for (class, cond, want) in cells {
            assert_eq!(consumption_amount(class, cond), want, "{class:?}/{cond:?}");
        }
        for cond in ConsCondition::ALL {
            assert_eq!(consumption_amount(Zero, cond), 0);
        }
    }

    #[test]
    fn generation_follows_weather_unless_diesel_pins_it() {
        use GenCondition::*;
        assert_eq!(generation_amount(Vlegc, false), 0);
        assert_eq!(generation_amount(Legc, false), 1);
        assert_eq!(generation_amount(Megc, false), 2);
        assert_eq!(generation_amount(Hegc, false), 3);
        for cond in GenCondition::ALL {
            assert_eq!(generation_amount(cond, true), 3);
        }
    }

    #[test]
    fn behavior_classes_partition_the_states() {
        use BehaviorClass::*;
        let mut zero = 0;
        for state in UsvState::ALL {
            match behavior_class(state) {
                Lecb => assert_eq!(state, UsvState::Sk),
                Mecb => assert!(matches!(state, UsvState::Pf | UsvState::Ca)),
                Hecb => assert_eq!(state, UsvState::Pfh),
                Zero => zero += 1,
            }
        }
        assert_eq!(zero, 6);
    }

    #[test]
    fn default_build_has_expected_shape() {
        let def = build_usv_model(&ScenarioConfig::default());
        assert_eq!(def.agents.len(), 12);
        let vars: usize = def.agents.iter().map(|a| a.vars.len()).sum();
        assert_eq!(vars, 13);
        assert_eq!(def.formulas.len(), 15);
        let names: Vec<&str> = def.formulas.iter().map(|f| f.name.as_str()).collect();
        let expected: Vec<&str> = expected_verdicts().iter().map(|(n, _)| *n).collect();
        assert_eq!(names, expected);
        Model::compile(def).expect("scenario must compile");
    }

    #[test]
    fn scenario_text_round_trips_canonically() {
        let def = build_usv_model(&ScenarioConfig::default());
        let text = format_model(&def);
        let reparsed = parse_model(&text).expect("canonical text parses");
        assert_eq!(reparsed, def);
        assert_eq!(format_model(&reparsed), text);
    }

    #[test]
    fn config_invariants_are_enforced() {
        assert!(ScenarioConfig::default().validate().is_ok());
        let bad = ScenarioConfig { sk_reserve: 8, pfh_threshold: 8, ..Default::default() };
        assert!(matches!(bad.validate(), Err(ScenarioConfigError::Thresholds { .. })));
        let bad = ScenarioConfig { pfh_threshold: 11, ..Default::default() };
        assert!(matches!(bad.validate(), Err(ScenarioConfigError::Thresholds { .. })));
        let bad = ScenarioConfig { battery_init: 11, ..Default::default() };
        assert!(matches!(bad.validate(), Err(ScenarioConfigError::Init { .. })));
        let bad = ScenarioConfig { sk_reserve: -1, ..Default::default() };
        assert!(matches!(bad.validate(), Err(ScenarioConfigError::Thresholds { .. })));
    }

    #[test]
    fn thresholds_parameterize_guards_and_formulas() {
        let cfg = ScenarioConfig {
            battery_init: 6,
            battery_max: 6,
            pfh_threshold: 5,
            sk_reserve: 1,
        };
        let def = build_usv_model(&cfg);
        Model::compile(def).expect("non-default scenario must compile");
    }
}
