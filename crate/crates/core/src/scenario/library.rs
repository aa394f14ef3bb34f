//! Named inequalities of the three-setting, two-outcome scenario.
//!
//! The nine facet classes of the Local-Friendliness polytope and the five
//! example inequalities (one per category) used for the state sweep. Setting
//! `1` of each party is the "ask the friend" setting.

use super::Inequality;

pub const GENUINE_LF_1: &str = "genuine-lf-1";
pub const GENUINE_LF_2: &str = "genuine-lf-2";
pub const I3322_12: &str = "i3322-12";
pub const I3322_23: &str = "i3322-23";
pub const BRUKNER: &str = "brukner";
pub const SEMI_BRUKNER: &str = "semi-brukner";
pub const POSITIVITY_11: &str = "positivity-11";
pub const POSITIVITY_12: &str = "positivity-12";
pub const POSITIVITY_22: &str = "positivity-22";

pub const SWEEP_GENUINE_LF: &str = "genuine-lf";
pub const SWEEP_I3322: &str = "i3322";
pub const SWEEP_BRUKNER: &str = "brukner-sweep";
pub const SWEEP_SEMI_BRUKNER: &str = "semi-brukner-sweep";
pub const BELL_NON_LF: &str = "bell-non-lf";

pub fn genuine_lf_1() -> Inequality {
    Inequality::from_terms(
        GENUINE_LF_1,
        3,
        &[
            ("A1", -1),
            ("A2", -1),
            ("B1", -1),
            ("B2", -1),
            ("A1B1", -1),
            ("A1B2", -2),
            ("A2B1", -2),
            ("A2B2", 2),
            ("A2B3", -1),
            ("A3B2", -1),
            ("A3B3", -1),
        ],
        6,
    )
}

pub fn genuine_lf_2() -> Inequality {
    Inequality::from_terms(
        GENUINE_LF_2,
        3,
        &[
            ("A1", -1),
            ("A2", -1),
            ("A3", -1),
            ("B1", -1),
            ("A1B1", -1),
            ("A2B1", -1),
            ("A3B1", -1),
            ("A1B2", -2),
            ("A2B2", 1),
            ("A3B2", 1),
            ("A2B3", -1),
            ("A3B3", 1),
        ],
        5,
    )
}

/// `I3322` with marginals on settings 1 and 2.
pub fn i3322_12() -> Inequality {
    Inequality::from_terms(
        I3322_12,
        3,
        &[
            ("A1", -1),
            ("A2", 1),
            ("B1", 1),
            ("B2", -1),
            ("A1B1", 1),
            ("A1B2", -1),
            ("A1B3", -1),
            ("A2B1", -1),
            ("A2B2", 1),
            ("A2B3", -1),
            ("A3B1", -1),
            ("A3B2", -1),
        ],
        4,
    )
}

/// `I3322` with marginals on settings 2 and 3.
pub fn i3322_23() -> Inequality {
    Inequality::from_terms(
        I3322_23,
        3,
        &[
            ("A2", -1),
            ("A3", -1),
            ("B2", -1),
            ("B3", -1),
            ("A1B2", -1),
            ("A1B3", 1),
            ("A2B1", -1),
            ("A2B2", -1),
            ("A2B3", -1),
            ("A3B1", 1),
            ("A3B2", -1),
            ("A3B3", -1),
        ],
        4,
    )
}

/// CHSH on settings 1 and 2 of both parties.
pub fn brukner() -> Inequality {
    Inequality::from_terms(
        BRUKNER,
        3,
        &[("A1B1", 1), ("A1B2", 1), ("A2B1", 1), ("A2B2", -1)],
        2,
    )
}

/// CHSH on settings 2, 3 of Alice and 1, 2 of Bob.
pub fn semi_brukner() -> Inequality {
    Inequality::from_terms(
        SEMI_BRUKNER,
        3,
        &[("A2B1", 1), ("A2B2", 1), ("A3B1", 1), ("A3B2", -1)],
        2,
    )
}

/// `1 + <A1> + <B1> + <A1B1> >= 0`
pub fn positivity_11() -> Inequality {
    Inequality::from_terms(POSITIVITY_11, 3, &[("A1", -1), ("B1", -1), ("A1B1", -1)], 1)
}

pub fn positivity_12() -> Inequality {
    Inequality::from_terms(POSITIVITY_12, 3, &[("A1", -1), ("B2", -1), ("A1B2", -1)], 1)
}

pub fn positivity_22() -> Inequality {
    Inequality::from_terms(POSITIVITY_22, 3, &[("A2", -1), ("B2", -1), ("A2B2", -1)], 1)
}

/// CHSH on settings 2 and 3 of both parties: a facet of the local polytope
/// that is not a facet of the Local-Friendliness polytope.
pub fn bell_non_lf() -> Inequality {
    Inequality::from_terms(
        BELL_NON_LF,
        3,
        &[("A2B2", 1), ("A2B3", -1), ("A3B2", -1), ("A3B3", -1)],
        2,
    )
}

/// The Brukner-category inequality used in the state sweep.
pub fn brukner_sweep() -> Inequality {
    Inequality::from_terms(
        SWEEP_BRUKNER,
        3,
        &[("A1B1", 1), ("A1B3", -1), ("A2B1", -1), ("A2B3", -1)],
        2,
    )
}

/// The Semi-Brukner-category inequality used in the state sweep.
pub fn semi_brukner_sweep() -> Inequality {
    Inequality::from_terms(
        SWEEP_SEMI_BRUKNER,
        3,
        &[("A1B2", -1), ("A1B3", 1), ("A3B2", -1), ("A3B3", -1)],
        2,
    )
}

/// Nine class representatives in their conventional order.
pub fn lf_facet_classes() -> Vec<Inequality> {
    vec![
        genuine_lf_1(),
        genuine_lf_2(),
        i3322_12(),
        i3322_23(),
        brukner(),
        semi_brukner(),
        positivity_11(),
        positivity_12(),
        positivity_22(),
    ]
}

/// Published multiplicities of the nine classes among the 932 facets.
pub const LF_CLASS_MULTIPLICITIES: [usize; 9] = [256, 256, 256, 64, 32, 32, 4, 16, 16];

/// One example per category: Genuine LF, I3322, Brukner, Semi-Brukner and
/// Bell non-LF.
pub fn sweep_inequalities() -> Vec<Inequality> {
    vec![
        genuine_lf_1().with_label(SWEEP_GENUINE_LF),
        i3322_12().with_label(SWEEP_I3322),
        brukner_sweep(),
        semi_brukner_sweep(),
        bell_non_lf(),
    ]
}

/// Looks up any named inequality of this module.
pub fn by_label(label: &str) -> Option<Inequality> {
    lf_facet_classes()
        .into_iter()
        .chain(sweep_inequalities())
        .find(|i| i.label == label)
}

pub fn labels() -> Vec<String> {
    lf_facet_classes()
        .into_iter()
        .chain(sweep_inequalities())
        .map(|i| i.label)
        .collect()
}
