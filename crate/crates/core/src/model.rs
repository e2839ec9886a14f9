//! Patient states, the parameter set, and per-tick state transitions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::Cell;
use crate::error::ParamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatientState {
    Resistant,
    Susceptible,
    Colonized,
    Diseased,
}

impl PatientState {
    pub const ALL: [PatientState; 4] = [
        PatientState::Resistant,
        PatientState::Susceptible,
        PatientState::Colonized,
        PatientState::Diseased,
    ];

    /// Colonized and Diseased patients shed onto surfaces and infect by contact.
    pub fn is_infectious(self) -> bool {
        matches!(self, PatientState::Colonized | PatientState::Diseased)
    }

    /// Resistant and Susceptible patients can pick up an infection.
    pub fn is_infectable(self) -> bool {
        !self.is_infectious()
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patient {
    pub id: u64,
    pub state: PatientState,
    pub ticks_in_state: u32,
    pub position: Cell,
}

impl Patient {
    pub fn new(id: u64, state: PatientState, position: Cell) -> Self {
        Patient {
            id,
            state,
            ticks_in_state: 0,
            position,
        }
    }

    pub fn change_state(&mut self, state: PatientState) {
        self.state = state;
        self.ticks_in_state = 0;
    }
}

/// The full model parameter set. Defaults are the published values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Parameters {
    pub a_r: f64,
    pub a_s: f64,
    pub a_c: f64,
    pub a_d: f64,

    pub k_r: f64,
    pub k_s: f64,
    pub k_c: f64,
    pub k_d: f64,

    pub p_rs: f64,
    pub p_sc: f64,
    pub p_sd: f64,
    pub p_cd: f64,
    pub p_cr: f64,
    pub p_dr: f64,
    pub p_ds: f64,
    pub p_death: f64,

    pub p_ic: f64,
    pub p_id: f64,
    pub p_ht: f64,
    pub p_lt: f64,

    pub shed_c: f64,
    pub shed_d: f64,

    pub min_stay_r: u32,
    pub min_stay_s: u32,
    pub min_stay_c: u32,
    pub min_stay_d: u32,

    pub initial_patients: u32,
    pub admissions_per_tick: u32,
    pub capacity: u32,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            a_r: 0.75,
            a_s: 0.09,
            a_c: 0.15,
            a_d: 0.01,
            k_r: 0.33,
            k_s: 0.15,
            k_c: 0.15,
            k_d: 0.068,
            p_rs: 0.02,
            p_sc: 0.001,
            p_sd: 0.001,
            p_cd: 0.024,
            p_cr: 0.012,
            p_dr: 0.01,
            p_ds: 0.08,
            p_death: 0.009,
            p_ic: 0.48,
            p_id: 0.382,
            p_ht: 0.4,
            p_lt: 0.2,
            shed_c: 0.006,
            shed_d: 0.013,
            min_stay_r: 10,
            min_stay_s: 30,
            min_stay_c: 15,
            min_stay_d: 10,
            initial_patients: 50,
            admissions_per_tick: 10,
            capacity: 150,
        }
    }
}

const ADMISSION_SUM_TOLERANCE: f64 = 1e-9;

impl Parameters {
    fn probabilities(&self) -> [(&'static str, f64); 20] {
        [
            ("a_r", self.a_r),
            ("a_s", self.a_s),
            ("a_c", self.a_c),
            ("a_d", self.a_d),
            ("k_r", self.k_r),
            ("k_s", self.k_s),
            ("k_c", self.k_c),
            ("k_d", self.k_d),
            ("p_rs", self.p_rs),
            ("p_sc", self.p_sc),
            ("p_sd", self.p_sd),
            ("p_cd", self.p_cd),
            ("p_cr", self.p_cr),
            ("p_dr", self.p_dr),
            ("p_ds", self.p_ds),
            ("p_death", self.p_death),
            ("p_ic", self.p_ic),
            ("p_id", self.p_id),
            ("p_ht", self.p_ht),
            ("p_lt", self.p_lt),
        ]
    }

    /// Checks every probability range, the admission mix and the shed rates.
    pub fn validate(self) -> Result<Self, ParamError> {
        for (name, value) in self.probabilities() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ParamError::ProbabilityOutOfRange { name, value });
            }
        }
        for (name, value) in [("shed_c", self.shed_c), ("shed_d", self.shed_d)] {
            if !value.is_finite() || value < 0.0 {
                return Err(ParamError::NegativeValue { name, value });
            }
        }
        let sum = self.a_r + self.a_s + self.a_c + self.a_d;
        if (sum - 1.0).abs() > ADMISSION_SUM_TOLERANCE {
            return Err(ParamError::AdmissionMixNotNormalized { sum });
        }
        Ok(self)
    }

    /// Categorical draw over the admission mix in R, S, C, D order.
    pub fn sample_admission_state(&self, draw: f64) -> PatientState {
        let mut cumulative = self.a_r;
        if draw < cumulative {
            return PatientState::Resistant;
        }
        cumulative += self.a_s;
        if draw < cumulative {
            return PatientState::Susceptible;
        }
        cumulative += self.a_c;
        if draw < cumulative {
            return PatientState::Colonized;
        }
        PatientState::Diseased
    }

    pub fn min_stay(&self, state: PatientState) -> u32 {
        match state {
            PatientState::Resistant => self.min_stay_r,
            PatientState::Susceptible => self.min_stay_s,
            PatientState::Colonized => self.min_stay_c,
            PatientState::Diseased => self.min_stay_d,
        }
    }

    /// The ordered Bernoulli draws evaluated for an eligible patient in
    /// `state`. The first success wins.
    pub fn outcome_ladder(&self, state: PatientState) -> Vec<(TransitionOutcome, f64)> {
        use PatientState::*;
        use TransitionOutcome::*;
        match state {
            Diseased => vec![
                (Death, self.p_death),
                (ChangeTo(Resistant), self.p_dr),
                (ChangeTo(Susceptible), self.p_ds),
                (Discharge, self.k_d),
            ],
            Resistant => vec![(ChangeTo(Susceptible), self.p_rs), (Discharge, self.k_r)],
            Susceptible => vec![
                (ChangeTo(Colonized), self.p_sc),
                (ChangeTo(Diseased), self.p_sd),
                (Discharge, self.k_s),
            ],
            Colonized => vec![
                (ChangeTo(Diseased), self.p_cd),
                (ChangeTo(Resistant), self.p_cr),
                (Discharge, self.k_c),
            ],
        }
    }
}

/// Minimum stay of a state under the default parameters.
pub fn min_stay(state: PatientState) -> u32 {
    Parameters::default().min_stay(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionOutcome {
    Stay,
    ChangeTo(PatientState),
    Discharge,
    Death,
}

/// Draws the end-of-tick outcome for one patient.
///
/// Nothing happens before the state's minimum stay has elapsed. After that,
/// independent Bernoulli draws are taken in ladder order and the first
/// success is returned; no success means the patient stays.
pub fn transition<R: Rng + ?Sized>(
    patient: &Patient,
    params: &Parameters,
    rng: &mut R,
) -> TransitionOutcome {
    if patient.ticks_in_state < params.min_stay(patient.state) {
        return TransitionOutcome::Stay;
    }
    for (outcome, p) in params.outcome_ladder(patient.state) {
        if bernoulli(rng, p) {
            return outcome;
        }
    }
    TransitionOutcome::Stay
}

/// A single Bernoulli trial. Exactly one uniform draw is consumed.
pub(crate) fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn patient(state: PatientState, ticks: u32) -> Patient {
        Patient {
            id: 1,
            state,
            ticks_in_state: ticks,
            position: Cell::new(10, 10),
        }
    }

    #[test]
    fn defaults_validate() {
        assert!(Parameters::default().validate().is_ok());
    }

    #[test]
    fn unnormalized_mix_rejected() {
        let p = Parameters {
            a_d: 0.0,
            ..Parameters::default()
        };
        match p.validate() {
            Err(ParamError::AdmissionMixNotNormalized { sum }) => {
                assert!((sum - 0.99).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn probability_out_of_range_rejected() {
        let p = Parameters {
            p_ic: 1.5,
            ..Parameters::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ParamError::ProbabilityOutOfRange { name: "p_ic", .. })
        ));
    }

    #[test]
    fn negative_shed_rejected() {
        let p = Parameters {
            shed_d: -0.1,
            ..Parameters::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ParamError::NegativeValue { name: "shed_d", .. })
        ));
    }

    #[test]
    fn admission_sampling() {
        let p = Parameters::default();
        assert_eq!(p.sample_admission_state(0.50), PatientState::Resistant);
        assert_eq!(p.sample_admission_state(0.80), PatientState::Susceptible);
        assert_eq!(p.sample_admission_state(0.90), PatientState::Colonized);
        assert_eq!(p.sample_admission_state(0.995), PatientState::Diseased);

        let degenerate = Parameters {
            a_r: 1.0,
            a_s: 0.0,
            a_c: 0.0,
            a_d: 0.0,
            ..Parameters::default()
        };
        for draw in [0.0, 0.3, 0.999_999] {
            assert_eq!(
                degenerate.sample_admission_state(draw),
                PatientState::Resistant
            );
        }
    }

    #[test]
    fn min_stays() {
        assert_eq!(min_stay(PatientState::Resistant), 10);
        assert_eq!(min_stay(PatientState::Susceptible), 30);
        assert_eq!(min_stay(PatientState::Colonized), 15);
        assert_eq!(min_stay(PatientState::Diseased), 10);
    }

    #[test]
    fn gated_before_min_stay() {
        let params = Parameters {
            k_r: 1.0,
            p_rs: 1.0,
            ..Parameters::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in 0..10 {
            assert_eq!(
                transition(&patient(PatientState::Resistant, t), &params, &mut rng),
                TransitionOutcome::Stay
            );
        }
        assert_eq!(
            transition(&patient(PatientState::Resistant, 10), &params, &mut rng),
            TransitionOutcome::ChangeTo(PatientState::Susceptible)
        );
    }

    #[test]
    fn certain_death_wins_first() {
        let params = Parameters {
            p_death: 1.0,
            ..Parameters::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            transition(&patient(PatientState::Diseased, 10), &params, &mut rng),
            TransitionOutcome::Death
        );
    }

    #[test]
    fn zero_probabilities_always_stay() {
        let params = Parameters {
            k_r: 0.0,
            k_s: 0.0,
            k_c: 0.0,
            k_d: 0.0,
            p_rs: 0.0,
            p_sc: 0.0,
            p_sd: 0.0,
            p_cd: 0.0,
            p_cr: 0.0,
            p_dr: 0.0,
            p_ds: 0.0,
            p_death: 0.0,
            ..Parameters::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for state in PatientState::ALL {
            let p = patient(state, 100);
            for _ in 0..10_000 {
                assert_eq!(transition(&p, &params, &mut rng), TransitionOutcome::Stay);
            }
        }
    }
}
