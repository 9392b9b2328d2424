//! Synchronous stochastic update of the five-compartment malware/awareness
//! model.
//!
//! Contact transitions combine independent per-neighbour attempts, so a node
//! with `k` relevant neighbours fires with probability `1 - (1 - rate)^k`.
//! Spontaneous transitions (awareness at `mu`, healing at `gamma`) ignore the
//! neighbourhood. All draws of a step come from counter-based streams keyed
//! by (run stream, t, node key), so the update does not depend on the order
//! in which nodes are visited.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::damage::{self, DamageModel};
use crate::error::{check_unit, Error, Result};
use crate::graph::Graph;
use crate::rng::{self, mix64, Purpose, StepDraws};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Compartment {
    SusceptibleUnaware = 0,
    SusceptibleAware = 1,
    InfectedUnaware = 2,
    InfectedAware = 3,
    HealedAware = 4,
}

impl Compartment {
    pub const ALL: [Compartment; 5] = [
        Compartment::SusceptibleUnaware,
        Compartment::SusceptibleAware,
        Compartment::InfectedUnaware,
        Compartment::InfectedAware,
        Compartment::HealedAware,
    ];

    /// Carries the malware.
    #[inline]
    pub fn is_infective(self) -> bool {
        matches!(self, Compartment::InfectedUnaware | Compartment::InfectedAware)
    }

    /// Knows about the malware and signals it to neighbours.
    #[inline]
    pub fn is_aware(self) -> bool {
        matches!(
            self,
            Compartment::SusceptibleAware | Compartment::InfectedAware | Compartment::HealedAware
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Compartment::SusceptibleUnaware => "Su",
            Compartment::SusceptibleAware => "Sa",
            Compartment::InfectedUnaware => "Iu",
            Compartment::InfectedAware => "Ia",
            Compartment::HealedAware => "Ha",
        }
    }

    /// Whether `self -> to` is one of the model's arrows.
    pub fn can_move_to(self, to: Compartment) -> bool {
        use Compartment::*;
        matches!(
            (self, to),
            (SusceptibleUnaware, InfectedUnaware)
                | (SusceptibleUnaware, SusceptibleAware)
                | (SusceptibleAware, InfectedAware)
                | (InfectedUnaware, InfectedAware)
                | (SusceptibleAware, HealedAware)
                | (InfectedAware, HealedAware)
        )
    }
}

/// Transition rates and threshold. Defaults are the reference parameter set
/// (`tau = 0.0055`, `nu = mu0 = 0.011`, `gamma = 0.03`, `rho0 = 0.01`) with
/// `theta = 0.2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub tau: f64,
    /// Aware susceptibles are infected at `aware_infection_factor * tau`.
    pub aware_infection_factor: f64,
    pub nu: f64,
    pub mu0: f64,
    pub gamma: f64,
    pub theta: f64,
    pub rho0: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            tau: 0.0055,
            aware_infection_factor: 0.1,
            nu: 0.011,
            mu0: 0.011,
            gamma: 0.03,
            theta: 0.2,
            rho0: 0.01,
        }
    }
}

impl ModelParams {
    /// Infection rate of aware susceptibles.
    #[inline]
    pub fn tau_aware(&self) -> f64 {
        self.aware_infection_factor * self.tau
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("tau", self.tau)?;
        check_unit("aware_infection_factor", self.aware_infection_factor)?;
        check_unit("nu", self.nu)?;
        check_unit("mu0", self.mu0)?;
        check_unit("gamma", self.gamma)?;
        check_unit("theta", self.theta)?;
        if !(self.rho0 > 0.0 && self.rho0 <= 1.0) {
            return Err(Error::Param {
                name: "rho0",
                value: self.rho0,
                range: "(0,1]",
            });
        }
        Ok(())
    }

    /// Number of initially infected nodes, `round(rho0 * n)` with halves
    /// rounded up.
    pub fn seed_count(&self, n: usize) -> Result<usize> {
        let k = (self.rho0 * n as f64 + 0.5).floor() as usize;
        if k == 0 {
            return Err(Error::Invalid(format!(
                "rho0 * n = {} rounds to zero initially infected nodes",
                self.rho0 * n as f64
            )));
        }
        Ok(k.min(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub compartment: Compartment,
    /// Damage suffered when the node was infected; 0 if never infected.
    pub damage_received: f64,
    /// Hops the infecting strain travelled (0 for seeds and uninfected nodes).
    pub strain_generation: u32,
    pub ever_infected: bool,
}

impl NodeState {
    pub const SUSCEPTIBLE: NodeState = NodeState {
        compartment: Compartment::SusceptibleUnaware,
        damage_received: 0.0,
        strain_generation: 0,
        ever_infected: false,
    };

    pub fn infected(compartment: Compartment, damage_received: f64, strain_generation: u32) -> Self {
        Self {
            compartment,
            damage_received,
            strain_generation,
            ever_infected: true,
        }
    }
}

/// Per-compartment tallies, indexed by `Compartment as usize`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Counts(pub [usize; 5]);

impl Counts {
    #[inline]
    pub fn get(&self, c: Compartment) -> usize {
        self.0[c as usize]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn aware(&self) -> usize {
        self.get(Compartment::SusceptibleAware)
            + self.get(Compartment::InfectedAware)
            + self.get(Compartment::HealedAware)
    }
}

/// Full simulation state of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    t: u64,
    nodes: Vec<NodeState>,
    stream: u64,
    node_keys: Vec<u64>,
    infective_neighbors: Vec<u32>,
    aware_neighbors: Vec<u32>,
    counts: Counts,
}

impl SimState {
    /// Builds a state from explicit node states. `stream` keys the random
    /// draws of subsequent steps.
    pub fn from_nodes(g: &Graph, nodes: Vec<NodeState>, t: u64, stream: u64) -> Result<Self> {
        let keys = (0..nodes.len() as u64).collect();
        Self::with_node_keys(g, nodes, t, stream, keys)
    }

    /// Like [`SimState::from_nodes`] but with an explicit random-stream key
    /// per node, so a relabelled graph can reuse the draws of the original.
    pub fn with_node_keys(
        g: &Graph,
        nodes: Vec<NodeState>,
        t: u64,
        stream: u64,
        node_keys: Vec<u64>,
    ) -> Result<Self> {
        if nodes.len() != g.n() || node_keys.len() != g.n() {
            return Err(Error::Invalid(format!(
                "state has {} nodes and {} keys but the graph has {}",
                nodes.len(),
                node_keys.len(),
                g.n()
            )));
        }
        let mut state = Self {
            t,
            nodes,
            stream,
            node_keys,
            infective_neighbors: Vec::new(),
            aware_neighbors: Vec::new(),
            counts: Counts::default(),
        };
        state.recount(g);
        Ok(state)
    }

    fn recount(&mut self, g: &Graph) {
        let n = self.nodes.len();
        self.infective_neighbors = vec![0; n];
        self.aware_neighbors = vec![0; n];
        self.counts = Counts::default();
        for (u, node) in self.nodes.iter().enumerate() {
            self.counts.0[node.compartment as usize] += 1;
            let (inf, aware) = (node.compartment.is_infective(), node.compartment.is_aware());
            for &v in g.neighbors(u) {
                self.infective_neighbors[v] += u32::from(inf);
                self.aware_neighbors[v] += u32::from(aware);
            }
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &NodeState {
        &self.nodes[i]
    }

    pub fn counts(&self) -> Counts {
        self.counts
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn node_keys(&self) -> &[u64] {
        &self.node_keys
    }

    /// Moves node `i` to position `perm[i]` and relabels the graph to match.
    pub fn permuted(&self, g: &Graph, perm: &[usize]) -> Result<(Graph, SimState)> {
        let pg = g.permuted(perm)?;
        let n = self.n();
        let mut nodes = vec![NodeState::SUSCEPTIBLE; n];
        let mut keys = vec![0; n];
        for i in 0..n {
            nodes[perm[i]] = self.nodes[i];
            keys[perm[i]] = self.node_keys[i];
        }
        let state = SimState::with_node_keys(&pg, nodes, self.t, self.stream, keys)?;
        Ok((pg, state))
    }
}

/// Probability of each candidate event for one node during one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EventProbs {
    pub infect: f64,
    pub aware_contact: f64,
    pub aware_spontaneous: f64,
    pub heal: f64,
}

impl EventProbs {
    /// Event probabilities for a node in `compartment` with the given numbers
    /// of infective and aware neighbours and spontaneous awareness rate `mu`.
    #[inline]
    pub fn from_counts(
        compartment: Compartment,
        infective_neighbors: u32,
        aware_neighbors: u32,
        mu: f64,
        params: &ModelParams,
    ) -> Self {
        let contact = |rate: f64, k: u32| {
            if k == 0 {
                0.0
            } else if k == 1 {
                rate
            } else {
                1.0 - (1.0 - rate).powi(k as i32)
            }
        };
        match compartment {
            Compartment::SusceptibleUnaware => EventProbs {
                infect: contact(params.tau, infective_neighbors),
                aware_contact: contact(params.nu, aware_neighbors),
                ..Default::default()
            },
            Compartment::SusceptibleAware => EventProbs {
                infect: contact(params.tau_aware(), infective_neighbors),
                heal: params.gamma,
                ..Default::default()
            },
            Compartment::InfectedUnaware => EventProbs {
                aware_contact: contact(params.nu, aware_neighbors),
                aware_spontaneous: mu,
                ..Default::default()
            },
            Compartment::InfectedAware => EventProbs {
                heal: params.gamma,
                ..Default::default()
            },
            Compartment::HealedAware => EventProbs::default(),
        }
    }

    pub fn any_positive(&self) -> bool {
        self.infect > 0.0 || self.aware_contact > 0.0 || self.aware_spontaneous > 0.0 || self.heal > 0.0
    }
}

/// Event probabilities of node `node`, counting its neighbourhood directly in
/// `g`. `mu` is the node's spontaneous awareness rate.
pub fn event_probabilities(
    node: usize,
    state: &SimState,
    g: &Graph,
    params: &ModelParams,
    mu: f64,
) -> EventProbs {
    let mut infective = 0;
    let mut aware = 0;
    for &v in g.neighbors(node) {
        let c = state.nodes[v].compartment;
        infective += u32::from(c.is_infective());
        aware += u32::from(c.is_aware());
    }
    EventProbs::from_counts(state.nodes[node].compartment, infective, aware, mu, params)
}

/// Initial state: all nodes susceptible-unaware except `round(rho0 * n)`
/// uniformly chosen seeds, which start infected-unaware.
pub fn init_state(g: &Graph, params: &ModelParams, dmg: &DamageModel, seed: u64) -> Result<SimState> {
    let n = g.n();
    let k = params.seed_count(n)?;
    let mut rng = rng::sequential(seed, 0, Purpose::Seeding);
    let mut nodes = vec![NodeState::SUSCEPTIBLE; n];
    let (d, generation) = damage::assign_seed(dmg);
    for i in index::sample(&mut rng, n, k) {
        nodes[i] = NodeState::infected(Compartment::InfectedUnaware, d, generation);
    }
    SimState::from_nodes(g, nodes, 0, rng::stream_seed(seed, 0, Purpose::Dynamics))
}

// draw slots within a node's per-step stream
const SLOT_INFECT: u64 = 0;
const SLOT_AWARE_CONTACT: u64 = 1;
const SLOT_SPONTANEOUS: u64 = 2;
const SLOT_TIE: u64 = 3;
const SLOT_INFECTOR: u64 = 4;

struct Change {
    node: usize,
    to: Compartment,
    /// (damage, generation) when the change is an infection
    infection: Option<(f64, u32)>,
}

/// Infective neighbour that transmitted the strain, uniform among the
/// infective neighbours at step `t`. Chosen by the smallest keyed hash so the
/// choice does not depend on adjacency order.
fn pick_infector(state: &SimState, g: &Graph, node: usize, draws: &StepDraws) -> usize {
    let salt = mix64(draws.uniform(SLOT_INFECTOR).to_bits());
    g.neighbors(node)
        .iter()
        .copied()
        .filter(|&v| state.nodes[v].compartment.is_infective())
        .min_by_key(|&v| mix64(salt ^ state.node_keys[v]))
        .expect("infection without infective neighbour")
}

/// Advances the state by one synchronous sweep.
///
/// Every node's events are drawn against the compartments at step `t` and
/// applied together. A susceptible node for which two competing events fire
/// in the same step takes one of them with equal probability.
pub fn step(state: &mut SimState, g: &Graph, params: &ModelParams, dmg: &DamageModel) {
    let mut changes: Vec<Change> = Vec::new();
    let t = state.t;

    for i in 0..state.nodes.len() {
        let node = &state.nodes[i];
        let comp = node.compartment;
        let n_inf = state.infective_neighbors[i];
        let n_aware = state.aware_neighbors[i];
        match comp {
            Compartment::HealedAware => continue,
            Compartment::SusceptibleUnaware if n_inf == 0 && n_aware == 0 => continue,
            _ => {}
        }
        let mu = if comp == Compartment::InfectedUnaware {
            damage::mu_of(node.damage_received, params)
        } else {
            0.0
        };
        let p = EventProbs::from_counts(comp, n_inf, n_aware, mu, params);
        if !p.any_positive() {
            continue;
        }
        let draws = StepDraws::new(state.stream, t, state.node_keys[i]);
        let fires = |prob: f64, slot: u64| prob > 0.0 && draws.uniform(slot) < prob;

        let infect_with = |state: &SimState| {
            let infector = pick_infector(state, g, i, &draws);
            damage::assign_infection(dmg, t + 1, state.nodes[infector].strain_generation)
        };

        let change = match comp {
            Compartment::SusceptibleUnaware => {
                let infected = fires(p.infect, SLOT_INFECT);
                let aware = fires(p.aware_contact, SLOT_AWARE_CONTACT);
                let infected = match (infected, aware) {
                    (true, true) => Some(draws.uniform(SLOT_TIE) < 0.5),
                    (true, false) => Some(true),
                    (false, true) => Some(false),
                    (false, false) => None,
                };
                infected.map(|inf| {
                    if inf {
                        Change {
                            node: i,
                            to: Compartment::InfectedUnaware,
                            infection: Some(infect_with(state)),
                        }
                    } else {
                        Change {
                            node: i,
                            to: Compartment::SusceptibleAware,
                            infection: None,
                        }
                    }
                })
            }
            Compartment::SusceptibleAware => {
                let infected = fires(p.infect, SLOT_INFECT);
                let healed = fires(p.heal, SLOT_SPONTANEOUS);
                let infected = match (infected, healed) {
                    (true, true) => Some(draws.uniform(SLOT_TIE) < 0.5),
                    (true, false) => Some(true),
                    (false, true) => Some(false),
                    (false, false) => None,
                };
                infected.map(|inf| {
                    if inf {
                        Change {
                            node: i,
                            to: Compartment::InfectedAware,
                            infection: Some(infect_with(state)),
                        }
                    } else {
                        Change {
                            node: i,
                            to: Compartment::HealedAware,
                            infection: None,
                        }
                    }
                })
            }
            Compartment::InfectedUnaware => {
                let aware = fires(p.aware_contact, SLOT_AWARE_CONTACT)
                    || fires(p.aware_spontaneous, SLOT_SPONTANEOUS);
                aware.then_some(Change {
                    node: i,
                    to: Compartment::InfectedAware,
                    infection: None,
                })
            }
            Compartment::InfectedAware => fires(p.heal, SLOT_SPONTANEOUS).then_some(Change {
                node: i,
                to: Compartment::HealedAware,
                infection: None,
            }),
            Compartment::HealedAware => None,
        };
        if let Some(c) = change {
            changes.push(c);
        }
    }

    for change in changes {
        apply(state, g, change);
    }
    state.t += 1;
}

fn apply(state: &mut SimState, g: &Graph, change: Change) {
    let node = &mut state.nodes[change.node];
    let from = node.compartment;
    debug_assert!(from.can_move_to(change.to), "{from:?} -> {:?}", change.to);
    node.compartment = change.to;
    if let Some((d, generation)) = change.infection {
        node.damage_received = d;
        node.strain_generation = generation;
        node.ever_infected = true;
    }
    state.counts.0[from as usize] -= 1;
    state.counts.0[change.to as usize] += 1;

    let inf_delta = i32::from(change.to.is_infective()) - i32::from(from.is_infective());
    let aware_delta = i32::from(change.to.is_aware()) - i32::from(from.is_aware());
    if inf_delta == 0 && aware_delta == 0 {
        return;
    }
    for &v in g.neighbors(change.node) {
        state.infective_neighbors[v] = state.infective_neighbors[v].wrapping_add_signed(inf_delta);
        state.aware_neighbors[v] = state.aware_neighbors[v].wrapping_add_signed(aware_delta);
    }
}

/// True iff no event has positive probability at any node.
pub fn is_absorbed(state: &SimState, params: &ModelParams) -> bool {
    state.nodes.iter().enumerate().all(|(i, node)| {
        let comp = node.compartment;
        if comp == Compartment::HealedAware {
            return true;
        }
        let mu = if comp == Compartment::InfectedUnaware {
            damage::mu_of(node.damage_received, params)
        } else {
            0.0
        };
        !EventProbs::from_counts(
            comp,
            state.infective_neighbors[i],
            state.aware_neighbors[i],
            mu,
            params,
        )
        .any_positive()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes_of(comps: &[Compartment], d: f64) -> Vec<NodeState> {
        comps
            .iter()
            .map(|&c| {
                if c.is_infective() {
                    NodeState::infected(c, d, 0)
                } else {
                    NodeState {
                        compartment: c,
                        ..NodeState::SUSCEPTIBLE
                    }
                }
            })
            .collect()
    }

    fn frozen() -> ModelParams {
        ModelParams {
            tau: 0.0,
            nu: 0.0,
            mu0: 0.0,
            gamma: 0.0,
            ..ModelParams::default()
        }
    }

    /// P(at least one of `k` independent Bernoulli(`p`) succeeds), by
    /// enumerating all 2^k outcomes.
    fn at_least_one(p: f64, k: u32) -> f64 {
        (0u32..(1 << k))
            .filter(|mask| *mask != 0)
            .map(|mask| {
                (0..k)
                    .map(|b| if mask & (1 << b) != 0 { p } else { 1.0 - p })
                    .product::<f64>()
            })
            .sum()
    }

    use Compartment::*;

    #[test]
    fn seed_counts() {
        let p = |rho0| ModelParams { rho0, ..ModelParams::default() };
        assert_eq!(p(0.01).seed_count(1000).unwrap(), 10);
        assert_eq!(p(1.0).seed_count(100).unwrap(), 100);
        assert_eq!(p(0.005).seed_count(100).unwrap(), 1);
        assert!(p(0.004).seed_count(100).is_err());
    }

    #[test]
    fn init_places_seeds() {
        let g = Graph::complete(1000);
        let dmg = DamageModel::Constant { d: 0.3 };
        let s = init_state(&g, &ModelParams::default(), &dmg, 4).unwrap();
        assert_eq!(s.counts().get(InfectedUnaware), 10);
        assert_eq!(s.counts().get(SusceptibleUnaware), 990);
        assert_eq!(s.t(), 0);
        for n in s.nodes().iter().filter(|n| n.compartment == InfectedUnaware) {
            assert_eq!((n.damage_received, n.strain_generation), (0.3, 0));
        }
        let full = ModelParams { rho0: 1.0, ..ModelParams::default() };
        let s = init_state(&Graph::complete(100), &full, &dmg, 4).unwrap();
        assert_eq!(s.counts().get(InfectedUnaware), 100);
    }

    #[test]
    fn single_infected_neighbour_uses_tau() {
        let g = Graph::complete(2);
        let s = SimState::from_nodes(&g, nodes_of(&[SusceptibleUnaware, InfectedUnaware], 0.3), 0, 1).unwrap();
        let p = event_probabilities(0, &s, &g, &ModelParams::default(), 0.0);
        assert_eq!(p.infect, 0.0055);
        assert_eq!(p.aware_contact, 0.0);
    }

    #[test]
    fn isolated_susceptible_has_no_events() {
        let g = Graph::empty(2);
        let s = SimState::from_nodes(&g, nodes_of(&[SusceptibleUnaware, InfectedUnaware], 0.3), 0, 1).unwrap();
        assert_eq!(event_probabilities(0, &s, &g, &ModelParams::default(), 0.0), EventProbs::default());
    }

    #[test]
    fn contact_probability_matches_enumeration() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let comps = [SusceptibleUnaware, InfectedUnaware, InfectedAware, InfectedUnaware];
        let s = SimState::from_nodes(&g, nodes_of(&comps, 0.3), 0, 1).unwrap();
        let params = ModelParams { tau: 0.5, nu: 0.2, ..ModelParams::default() };
        let p = event_probabilities(0, &s, &g, &params, 0.0);
        assert_eq!(p.infect, 0.875);
        assert!((p.infect - at_least_one(0.5, 3)).abs() < 1e-15);
        assert!((p.aware_contact - at_least_one(0.2, 1)).abs() < 1e-15);
    }

    #[test]
    fn aware_susceptible_uses_reduced_rate() {
        let g = Graph::complete(2);
        let s = SimState::from_nodes(&g, nodes_of(&[SusceptibleAware, InfectedUnaware], 0.3), 0, 1).unwrap();
        let params = ModelParams::default();
        let p = event_probabilities(0, &s, &g, &params, 0.0);
        assert!((p.infect - 0.00055).abs() < 1e-18);
        assert_eq!(p.heal, 0.03);
    }

    #[test]
    fn no_infection_means_no_change() {
        let g = Graph::complete(5);
        let mut s = SimState::from_nodes(&g, nodes_of(&[SusceptibleUnaware; 5], 0.0), 0, 1).unwrap();
        let before = s.nodes().to_vec();
        step(&mut s, &g, &ModelParams::default(), &DamageModel::Constant { d: 0.3 });
        assert_eq!(s.nodes(), &before[..]);
        assert_eq!(s.t(), 1);
    }

    #[test]
    fn forced_infection() {
        let g = Graph::complete(2);
        let params = ModelParams { tau: 1.0, ..frozen() };
        let mut s = SimState::from_nodes(&g, nodes_of(&[SusceptibleUnaware, InfectedUnaware], 0.3), 0, 9).unwrap();
        step(&mut s, &g, &params, &DamageModel::Constant { d: 0.3 });
        assert_eq!(s.node(0).compartment, InfectedUnaware);
        assert_eq!(s.node(0).strain_generation, 1);
        assert_eq!(s.node(0).damage_received, 0.3);
        assert!(is_absorbed(&s, &params));
    }

    #[test]
    fn mutating_generation_follows_infector() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let params = ModelParams { tau: 1.0, ..frozen() };
        let dmg = DamageModel::MutatingStrain { d0: 0.1, epsilon: 0.5 };
        let mut nodes = nodes_of(&[InfectedUnaware, SusceptibleUnaware, SusceptibleUnaware], 0.1);
        nodes[0].strain_generation = 3;
        let mut s = SimState::from_nodes(&g, nodes, 0, 2).unwrap();
        step(&mut s, &g, &params, &dmg);
        step(&mut s, &g, &params, &dmg);
        assert_eq!(s.node(1).strain_generation, 4);
        assert_eq!(s.node(2).strain_generation, 5);
        assert_eq!(s.node(2).damage_received, damage::damage_at(&dmg, 5));
    }

    #[test]
    fn absorption_cases() {
        let g = Graph::complete(3);
        let params = ModelParams::default();
        let s = SimState::from_nodes(&g, nodes_of(&[HealedAware; 3], 0.0), 0, 1).unwrap();
        assert!(is_absorbed(&s, &params));
        // below threshold nobody notices
        let s = SimState::from_nodes(&g, nodes_of(&[InfectedUnaware; 3], 0.1), 0, 1).unwrap();
        assert!(is_absorbed(&s, &params));
        let s = SimState::from_nodes(&g, nodes_of(&[InfectedUnaware; 3], 0.5), 0, 1).unwrap();
        assert!(!is_absorbed(&s, &params));
    }

    #[test]
    fn transitions() {
        assert!(SusceptibleUnaware.can_move_to(InfectedUnaware));
        assert!(!SusceptibleUnaware.can_move_to(InfectedAware));
        assert!(!HealedAware.can_move_to(SusceptibleUnaware));
        assert!(!InfectedUnaware.can_move_to(HealedAware));
        let arrows = Compartment::ALL
            .iter()
            .flat_map(|a| Compartment::ALL.iter().map(move |b| (a, b)))
            .filter(|(a, b)| a.can_move_to(**b))
            .count();
        assert_eq!(arrows, 6);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let bad = ModelParams { tau: 1.5, ..ModelParams::default() };
        match bad.validate() {
            Err(Error::Param { name, .. }) => assert_eq!(name, "tau"),
            other => panic!("{other:?}"),
        }
        assert!(ModelParams { rho0: 0.0, ..ModelParams::default() }.validate().is_err());
    }
}
