//! Tick-by-tick simulation of one replica.
//!
//! Each tick runs the same fixed phase order: admissions, movement,
//! shedding, surface infection, direct contact (when enabled), cleaning,
//! then state transitions. All randomness comes from the replica's own
//! seeded stream, so a `(config, seed)` pair always replays identically.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cleaning::apply_cleaning;
use crate::environment::{Cell, Grid, SurfaceKind, GRID_HEIGHT, GRID_WIDTH};
use crate::error::ParamError;
use crate::metrics::{AttributionCounters, InfectionSource, ReplicaResult};
use crate::model::{bernoulli, transition, Parameters, Patient, PatientState, TransitionOutcome};
use crate::Scenario;

pub const DEFAULT_HORIZON: u32 = 365;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: Parameters,
    pub scenario: Scenario,
    pub seed: u64,
    pub horizon: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            params: Parameters::default(),
            scenario: Scenario::default(),
            seed: 0,
            horizon: DEFAULT_HORIZON,
        }
    }
}

impl SimConfig {
    pub fn validate(self) -> Result<Self, ParamError> {
        let params = self.params.validate()?;
        Ok(SimConfig { params, ..self })
    }
}

/// Surface touches by kind, counted across both the shedding and the
/// infection pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TouchTally {
    pub high_touch: u64,
    pub low_touch: u64,
}

impl TouchTally {
    fn bump(&mut self, kind: SurfaceKind) {
        match kind {
            SurfaceKind::HighTouch => self.high_touch += 1,
            SurfaceKind::LowTouch => self.low_touch += 1,
        }
    }
}

/// One row of the optional per-tick trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub tick: u64,
    pub population: usize,
    pub by_state: [usize; 4],
    pub contamination_ht: f64,
    pub contamination_lt: f64,
}

impl TraceRow {
    pub const HEADER: &'static str =
        "tick,population,resistant,susceptible,colonized,diseased,contamination_ht,contamination_lt";

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.tick,
            self.population,
            self.by_state[0],
            self.by_state[1],
            self.by_state[2],
            self.by_state[3],
            self.contamination_ht,
            self.contamination_lt
        )
    }
}

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub tick: u64,
    pub grid: Grid,
    /// Always sorted by ascending id.
    pub patients: Vec<Patient>,
    pub next_patient_id: u64,
    pub rng: ChaCha8Rng,
    pub counters: AttributionCounters,
    pub touches: TouchTally,
}

impl SimulationState {
    /// A fresh ward with no patients.
    pub fn empty(seed: u64) -> Self {
        SimulationState {
            tick: 0,
            grid: Grid::generate_layout(),
            patients: Vec::new(),
            next_patient_id: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            counters: AttributionCounters::default(),
            touches: TouchTally::default(),
        }
    }

    /// The ward at tick 0 with the initial cohort placed.
    pub fn initialize(config: &SimConfig) -> Self {
        let mut state = SimulationState::empty(config.seed);
        let n = config.params.initial_patients.min(config.params.capacity);
        state.admit(n as usize, &config.params);
        state
    }

    pub fn population(&self) -> usize {
        self.patients.len()
    }

    pub fn count_by_state(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for p in &self.patients {
            out[p.state.index()] += 1;
        }
        out
    }

    pub fn trace_row(&self) -> TraceRow {
        TraceRow {
            tick: self.tick,
            population: self.population(),
            by_state: self.count_by_state(),
            contamination_ht: self.grid.total_contamination(SurfaceKind::HighTouch),
            contamination_lt: self.grid.total_contamination(SurfaceKind::LowTouch),
        }
    }

    /// Adds a patient with a given state and position. Used to set up
    /// scenarios directly; regular admissions go through [`Self::admit_patients`].
    pub fn insert_patient(&mut self, state: PatientState, position: Cell) -> u64 {
        assert!(self.grid.is_walkable(position), "{position} is not walkable");
        let id = self.next_patient_id;
        self.next_patient_id += 1;
        self.patients.push(Patient::new(id, state, position));
        self.counters.admissions += 1;
        id
    }

    fn admit(&mut self, n: usize, params: &Parameters) {
        for _ in 0..n {
            let state = params.sample_admission_state(self.rng.random::<f64>());
            let position = *self
                .grid
                .walkable_cells()
                .choose(&mut self.rng)
                .expect("grid has walkable cells");
            self.insert_patient(state, position);
        }
    }

    /// Admits up to `admissions_per_tick` patients without exceeding capacity.
    /// Returns how many were admitted.
    pub fn admit_patients(&mut self, params: &Parameters) -> usize {
        let room = (params.capacity as usize).saturating_sub(self.patients.len());
        let n = (params.admissions_per_tick as usize).min(room);
        self.admit(n, params);
        n
    }

    pub fn move_patients(&mut self) {
        for i in 0..self.patients.len() {
            let from = self.patients[i].position;
            self.patients[i].position = move_patient(from, &self.grid, &mut self.rng);
        }
    }

    fn touch_probability(params: &Parameters, kind: SurfaceKind) -> f64 {
        match kind {
            SurfaceKind::HighTouch => params.p_ht,
            SurfaceKind::LowTouch => params.p_lt,
        }
    }

    /// Infectious patients standing on a surface may touch it and deposit
    /// their shed load.
    pub fn shed_onto_surfaces(&mut self, params: &Parameters) {
        for i in 0..self.patients.len() {
            let p = &self.patients[i];
            let load = match p.state {
                PatientState::Colonized => params.shed_c,
                PatientState::Diseased => params.shed_d,
                _ => continue,
            };
            let Some(idx) = self.grid.surface_index_at(p.position) else {
                continue;
            };
            let kind = self.grid.surface(idx).kind;
            if bernoulli(&mut self.rng, Self::touch_probability(params, kind)) {
                self.touches.bump(kind);
                self.grid.surface_mut(idx).contamination += load;
            }
        }
    }

    /// Resistant and susceptible patients on a surface may touch it and
    /// become colonized with probability `min(1, contamination)`.
    pub fn infect_from_surfaces(&mut self, params: &Parameters) {
        for i in 0..self.patients.len() {
            let p = &self.patients[i];
            if !p.state.is_infectable() {
                continue;
            }
            let Some(idx) = self.grid.surface_index_at(p.position) else {
                continue;
            };
            let surface = self.grid.surface(idx);
            let (kind, dose) = (surface.kind, surface.contamination.min(1.0));
            if !bernoulli(&mut self.rng, Self::touch_probability(params, kind)) {
                continue;
            }
            self.touches.bump(kind);
            if bernoulli(&mut self.rng, dose) {
                self.patients[i].change_state(PatientState::Colonized);
                self.counters.record_infection(kind.into());
            }
        }
    }

    /// Person-to-person transmission within the Moore neighbourhood
    /// (including the shared cell). Sources are the infectious patients at
    /// the start of the pass; each target tries them in shuffled order and
    /// stops at the first success.
    pub fn direct_contact_infections(&mut self, params: &Parameters) {
        let mut occupancy: Vec<Vec<usize>> = vec![Vec::new(); GRID_WIDTH * GRID_HEIGHT];
        for (i, p) in self.patients.iter().enumerate() {
            if p.state.is_infectious() {
                occupancy[p.position.row * GRID_WIDTH + p.position.col].push(i);
            }
        }

        let mut sources: Vec<(usize, PatientState)> = Vec::new();
        for i in 0..self.patients.len() {
            if !self.patients[i].state.is_infectable() {
                continue;
            }
            let here = self.patients[i].position;
            sources.clear();
            for r in here.row.saturating_sub(1)..=(here.row + 1).min(GRID_HEIGHT - 1) {
                for c in here.col.saturating_sub(1)..=(here.col + 1).min(GRID_WIDTH - 1) {
                    for &j in &occupancy[r * GRID_WIDTH + c] {
                        sources.push((j, self.patients[j].state));
                    }
                }
            }
            if sources.is_empty() {
                continue;
            }
            sources.shuffle(&mut self.rng);
            for &(_, src_state) in sources.iter() {
                let (p, source) = match src_state {
                    PatientState::Colonized => (params.p_ic, InfectionSource::ColonizedPatient),
                    _ => (params.p_id, InfectionSource::DiseasedPatient),
                };
                if bernoulli(&mut self.rng, p) {
                    self.patients[i].change_state(PatientState::Colonized);
                    self.counters.record_infection(source);
                    break;
                }
            }
        }
    }

    /// Cleans whichever surface kinds are due at 1-based tick `tick`,
    /// high-touch first.
    pub fn clean_surfaces(&mut self, scenario: &Scenario, tick: u64) {
        let policy = &scenario.cleaning;
        let Some(schedule) = policy.schedule().copied() else {
            return;
        };
        for kind in SurfaceKind::BOTH {
            if !policy.cleaning_due(tick, kind) {
                continue;
            }
            let rate = schedule.rate(kind);
            for idx in policy.select_targets(&self.grid, kind, &mut self.rng) {
                apply_cleaning(self.grid.surface_mut(idx), rate);
            }
        }
    }

    /// Draws every patient's transition and removes those who leave.
    pub fn apply_transitions(&mut self, params: &Parameters) {
        let mut patients = std::mem::take(&mut self.patients);
        patients.retain_mut(|p| match transition(p, params, &mut self.rng) {
            TransitionOutcome::Stay => {
                p.ticks_in_state += 1;
                true
            }
            TransitionOutcome::ChangeTo(next) => {
                if p.state == PatientState::Susceptible && next.is_infectious() {
                    self.counters.spontaneous_colonizations += 1;
                }
                p.change_state(next);
                true
            }
            TransitionOutcome::Discharge => {
                self.counters.discharges += 1;
                false
            }
            TransitionOutcome::Death => {
                self.counters.deaths += 1;
                false
            }
        });
        self.patients = patients;
    }

    /// Advances one tick.
    pub fn step(&mut self, config: &SimConfig) {
        let params = &config.params;
        let tick = self.tick + 1;
        self.admit_patients(params);
        self.move_patients();
        self.shed_onto_surfaces(params);
        self.infect_from_surfaces(params);
        if config.scenario.direct_infection {
            self.direct_contact_infections(params);
        }
        self.clean_surfaces(&config.scenario, tick);
        self.apply_transitions(params);
        self.tick = tick;
    }
}

/// One random-walk step to a uniformly chosen walkable Moore neighbour.
pub fn move_patient<R: Rng + ?Sized>(from: Cell, grid: &Grid, rng: &mut R) -> Cell {
    grid.walkable_neighbors(from)
        .choose(rng)
        .copied()
        .unwrap_or(from)
}

/// Runs one replica to its horizon. `on_tick` sees the state after
/// initialisation and after every tick.
pub fn run_replica_with<F>(config: &SimConfig, mut on_tick: F) -> Result<SimulationState, ParamError>
where
    F: FnMut(&SimulationState),
{
    let config = config.clone().validate()?;
    let mut state = SimulationState::initialize(&config);
    on_tick(&state);
    for _ in 0..config.horizon {
        state.step(&config);
        on_tick(&state);
    }
    Ok(state)
}

/// Runs one ad-hoc replica; the result carries experiment id 0.
pub fn run_replica(config: &SimConfig) -> Result<ReplicaResult, ParamError> {
    let state = run_replica_with(config, |_| {})?;
    Ok(ReplicaResult {
        experiment_id: 0,
        combo_id: config.scenario.combo_key(),
        replica_index: 0,
        seed: config.seed,
        scenario: config.scenario,
        counters: state.counters,
        horizon: config.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cleaning::{CleaningPolicy, CleaningSchedule};

    fn quiet_params() -> Parameters {
        Parameters {
            admissions_per_tick: 0,
            initial_patients: 0,
            ..Parameters::default()
        }
    }

    #[test]
    fn horizon_zero() {
        let cfg = SimConfig {
            horizon: 0,
            ..SimConfig::default()
        };
        let r = run_replica(&cfg).unwrap();
        assert_eq!(r.counters.admissions, 50);
        assert_eq!(r.counters.total_contact_infections(), 0);
        assert_eq!(r.counters.discharges, 0);
    }

    #[test]
    fn diseased_shed_on_high_touch() {
        let params = Parameters {
            p_ht: 1.0,
            ..quiet_params()
        };
        let mut s = SimulationState::empty(1);
        s.insert_patient(PatientState::Diseased, Cell::new(3, 3));
        s.shed_onto_surfaces(&params);
        let c = s.grid.surface_at(Cell::new(3, 3)).unwrap().contamination;
        assert!((c - 0.013).abs() < 1e-15);
    }

    #[test]
    fn clean_surface_cannot_infect() {
        let params = Parameters {
            p_ht: 1.0,
            ..quiet_params()
        };
        let mut s = SimulationState::empty(1);
        s.insert_patient(PatientState::Susceptible, Cell::new(3, 3));
        for _ in 0..1000 {
            s.infect_from_surfaces(&params);
        }
        assert_eq!(s.patients[0].state, PatientState::Susceptible);
        assert_eq!(s.touches.high_touch, 1000);
    }

    #[test]
    fn saturated_surface_always_infects() {
        let params = Parameters {
            p_lt: 1.0,
            ..quiet_params()
        };
        let mut s = SimulationState::empty(1);
        let idx = s.grid.surface_index_at(Cell::new(3, 26)).unwrap();
        s.grid.surface_mut(idx).contamination = 1.7;
        s.insert_patient(PatientState::Resistant, Cell::new(3, 26));
        s.infect_from_surfaces(&params);
        assert_eq!(s.patients[0].state, PatientState::Colonized);
        assert_eq!(s.patients[0].ticks_in_state, 0);
        assert_eq!(s.counters.infected_by_lt, 1);
    }

    #[test]
    fn admission_clamps_to_capacity() {
        let params = Parameters::default();
        for (present, expected) in [(140, 10), (145, 5), (150, 0)] {
            let mut s = SimulationState::empty(2);
            for _ in 0..present {
                s.insert_patient(PatientState::Resistant, Cell::new(5, 5));
            }
            assert_eq!(s.admit_patients(&params), expected);
            assert_eq!(s.population(), present + expected);
        }
    }

    #[test]
    fn direct_contact_with_certain_source() {
        let params = Parameters {
            p_ic: 1.0,
            ..quiet_params()
        };
        let mut s = SimulationState::empty(4);
        s.insert_patient(PatientState::Susceptible, Cell::new(10, 10));
        s.insert_patient(PatientState::Colonized, Cell::new(11, 11));
        s.insert_patient(PatientState::Resistant, Cell::new(20, 20));
        s.direct_contact_infections(&params);
        assert_eq!(s.patients[0].state, PatientState::Colonized);
        assert_eq!(s.patients[2].state, PatientState::Resistant);
        assert_eq!(s.counters.infected_by_colonized, 1);
    }

    #[test]
    fn no_direct_infection_when_disabled() {
        let cfg = SimConfig {
            horizon: 200,
            seed: 17,
            ..SimConfig::default()
        };
        let r = run_replica(&cfg).unwrap();
        assert_eq!(r.counters.infected_by_colonized, 0);
        assert_eq!(r.counters.infected_by_diseased, 0);
    }

    #[test]
    fn total_clean_rate_one_zeroes_everything() {
        let mut s = SimulationState::empty(1);
        for i in 0..144 {
            s.grid.surface_mut(i).contamination = 0.3;
        }
        let scenario = Scenario {
            direct_infection: false,
            cleaning: CleaningPolicy::Total(CleaningSchedule::uniform(1, 1.0)),
        };
        s.clean_surfaces(&scenario, 7);
        assert!(s.grid.surfaces().iter().all(|x| x.contamination == 0.0));
    }

    #[test]
    fn same_seed_same_result() {
        let cfg = SimConfig {
            horizon: 120,
            seed: 99,
            scenario: Scenario {
                direct_infection: true,
                cleaning: CleaningPolicy::None,
            },
            ..SimConfig::default()
        };
        assert_eq!(run_replica(&cfg).unwrap(), run_replica(&cfg).unwrap());
    }
}
