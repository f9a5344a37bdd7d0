//! Multi-buyer social graphs and the no-learning, undisclosed-learning and
//! strategic-learning pricing mechanisms.

use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::no_learning_price;
use crate::error::{Error, Result};
use crate::model::{purchase_decision, social_utility_unchecked, MarketParams, Preference};
use crate::pbe::{solve_pbe, EquilibriumOutcome, Region};
use crate::sim::{self, Estimate};

/// Undirected simple graph of buyers with preferences, known flags and the
/// directed interaction choices on every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialGraph {
    ids: Vec<u64>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    prefs: Vec<Preference>,
    known: Vec<bool>,
    /// `(x_uv, x_vu)` for edge `(u, v)`.
    choices: Vec<(u8, u8)>,
}

impl SocialGraph {
    /// Graph on `n` nodes labeled `0..n`, all Low, unknown and honest.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut list = Vec::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) references a node outside 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at node {u}")));
            }
            if seen.insert((u.min(v), u.max(v))) {
                list.push((u.min(v), u.max(v)));
            }
        }
        Ok(Self::build((0..n as u64).collect(), list))
    }

    fn build(ids: Vec<u64>, edges: Vec<(usize, usize)>) -> Self {
        let n = ids.len();
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let m = edges.len();
        SocialGraph { ids, edges, adj, prefs: vec![Preference::Low; n], known: vec![false; n], choices: vec![(1, 1); m] }
    }

    pub fn n_nodes(&self) -> usize {
        self.ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.n_edges() as f64 / self.n_nodes() as f64
    }

    /// Original label of each compacted node id.
    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs of node `u`.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    pub fn preference(&self, u: usize) -> Preference {
        self.prefs[u]
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn is_known(&self, u: usize) -> bool {
        self.known[u]
    }

    pub fn unknown_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&u| !self.known[u]).collect()
    }

    /// Replaces preferences and resets every edge to honest play.
    pub fn set_preferences(&mut self, prefs: Vec<Preference>) -> Result<()> {
        if prefs.len() != self.n_nodes() {
            return Err(Error::InvalidInput(format!("expected {} preferences, got {}", self.n_nodes(), prefs.len())));
        }
        self.prefs = prefs;
        self.reset_honest();
        Ok(())
    }

    pub fn set_known(&mut self, u: usize, known: bool) -> Result<()> {
        if u >= self.n_nodes() {
            return Err(Error::InvalidInput(format!("node {u} out of range")));
        }
        self.known[u] = known;
        Ok(())
    }

    fn reset_honest(&mut self) {
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let x = u8::from(self.prefs[u] == self.prefs[v]);
            self.choices[e] = (x, x);
        }
    }

    /// Common frequency under honest play.
    pub fn truthful(&self, e: usize) -> u8 {
        let (u, v) = self.edges[e];
        u8::from(self.prefs[u] == self.prefs[v])
    }

    /// Observed common frequency.
    pub fn realized(&self, e: usize) -> u8 {
        let (a, b) = self.choices[e];
        a.min(b)
    }

    pub fn choices(&self, e: usize) -> (u8, u8) {
        self.choices[e]
    }

    /// Checks that only High–High edges deviate from honest play, and only
    /// downward.
    pub fn check_invariants(&self) -> Result<()> {
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at node {u}")));
            }
            let (t, r) = (self.truthful(e), self.realized(e));
            let both_high = self.prefs[u].is_high() && self.prefs[v].is_high();
            if r > t || (!both_high && r != t) {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) violates honest play off High–High pairs")));
            }
        }
        Ok(())
    }
}

/// Bundled synthetic 100-node, 230-edge graph.
pub const BUNDLED_FIXTURE: &str = include_str!("../fixtures/social100.edges");

/// Seed of the committed preference draw on the bundled graph.
pub const FIXTURE_PREFERENCE_SEED: u64 = 16;

pub fn bundled_fixture() -> SocialGraph {
    load_edge_list_str(BUNDLED_FIXTURE).expect("bundled fixture parses")
}

/// Reads a whitespace-separated edge list. Lines starting with `#` and blank
/// lines are skipped; node labels are compacted to `0..n` in order of first
/// appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<SocialGraph> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let mut next = || -> Result<u64> {
            let tok = parts.next().ok_or_else(|| Error::Parse { line: lineno, reason: "expected two node ids".into() })?;
            tok.parse::<u64>().map_err(|_| Error::Parse { line: lineno, reason: format!("`{tok}` is not a nonnegative integer") })
        };
        let (a, b) = (next()?, next()?);
        if parts.next().is_some() {
            return Err(Error::Parse { line: lineno, reason: "expected exactly two node ids".into() });
        }
        if a == b {
            return Err(Error::Parse { line: lineno, reason: format!("self-loop at node {a}") });
        }
        let mut id = |x: u64| -> usize {
            *index.entry(x).or_insert_with(|| {
                ids.push(x);
                ids.len() - 1
            })
        };
        let (u, v) = (id(a), id(b));
        if seen.insert((u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    Ok(SocialGraph::build(ids, edges))
}

pub fn load_edge_list_str(text: &str) -> Result<SocialGraph> {
    load_edge_list(text.as_bytes())
}

/// Independent High draws with probability `alpha` per node; edges reset to
/// honest play.
pub fn sample_preferences(graph: &SocialGraph, alpha: f64, seed: u64) -> Result<SocialGraph> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prefs = (0..graph.n_nodes())
        .map(|_| if rng.gen::<f64>() < alpha { Preference::High } else { Preference::Low })
        .collect();
    let mut g = graph.clone();
    g.set_preferences(prefs)?;
    Ok(g)
}

/// Whether `N/(N+1)·v_H < v_L < v_H − K(1−l)`.
pub fn no_gain_condition(n_unknown: usize, k_max: usize, params: &MarketParams) -> bool {
    let n = n_unknown as f64;
    let (h, lo) = (params.v_h(), params.v_l());
    n / (n + 1.0) * h < lo && lo < h - k_max as f64 * (1.0 - params.l())
}

/// Largest number of known High neighbors of any unknown node.
pub fn max_known_high_neighbors(graph: &SocialGraph) -> usize {
    graph
        .unknown_nodes()
        .iter()
        .map(|&u| graph.adj[u].iter().filter(|&&(v, _)| graph.known[v] && graph.prefs[v].is_high()).count())
        .max()
        .unwrap_or(0)
}

/// Whether unknown High buyers hide every tie to a known High buyer.
fn hides_known_ties(graph: &SocialGraph, params: &MarketParams) -> bool {
    let k = max_known_high_neighbors(graph);
    k >= 1 && no_gain_condition(graph.unknown_nodes().len(), k, params)
}

fn manipulate_with(graph: &SocialGraph, params: &MarketParams, rng: &mut impl Rng) -> Result<SocialGraph> {
    let rho = solve_pbe(params)?.rho_star;
    let hide_known = hides_known_ties(graph, params);
    let mut g = graph.clone();
    g.reset_honest();
    for (e, &(u, v)) in graph.edges.iter().enumerate() {
        if !(g.prefs[u].is_high() && g.prefs[v].is_high()) {
            continue;
        }
        match (g.known[u], g.known[v]) {
            (false, false) => {
                let xu = u8::from(rng.gen::<f64>() >= rho);
                let xv = u8::from(rng.gen::<f64>() >= rho);
                g.choices[e] = (xu, xv);
            }
            (true, false) if hide_known => g.choices[e] = (1, 0),
            (false, true) if hide_known => g.choices[e] = (0, 1),
            _ => {}
        }
    }
    Ok(g)
}

/// Equilibrium interaction play: each endpoint of a High–High edge between
/// unknown buyers independently hides with the two-buyer equilibrium
/// probability, and unknown High buyers hide ties to known High buyers when
/// the no-gain condition holds.
pub fn apply_manipulation(graph: &SocialGraph, params: &MarketParams, seed: u64) -> Result<SocialGraph> {
    manipulate_with(graph, params, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MechanismKind {
    Nlp,
    Ulp,
    Slp,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 3] = [MechanismKind::Nlp, MechanismKind::Ulp, MechanismKind::Slp];
}

/// Order in which unknown buyers arrive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalSequence(Vec<usize>);

impl ArrivalSequence {
    /// Validates that `order` is a permutation of the unknown nodes.
    pub fn new(order: Vec<usize>, graph: &SocialGraph) -> Result<Self> {
        let mut expect = graph.unknown_nodes();
        let mut got = order.clone();
        expect.sort_unstable();
        got.sort_unstable();
        if expect != got {
            return Err(Error::InvalidInput("arrival sequence must be a permutation of the unknown buyers".into()));
        }
        Ok(ArrivalSequence(order))
    }

    pub fn shuffled(graph: &SocialGraph, rng: &mut impl Rng) -> Self {
        let mut order = graph.unknown_nodes();
        order.shuffle(rng);
        ArrivalSequence(order)
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanismResult {
    pub revenue: f64,
    /// Purchase surplus plus social utility summed over incident edges.
    pub payoffs: Vec<f64>,
}

/// Disjoint-set forest with path halving.
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: (0..n).collect() }
    }

    fn find(&mut self, mut u: usize) -> usize {
        while self.parent[u] != u {
            self.parent[u] = self.parent[self.parent[u]];
            u = self.parent[u];
        }
        u
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn value(params: &MarketParams, pref: Preference) -> f64 {
    params.value(pref)
}

fn nlp(arrivals: &ArrivalSequence, params: &MarketParams, prices: &mut [Option<f64>]) {
    let p = no_learning_price(params);
    for &u in arrivals.order() {
        prices[u] = Some(p);
    }
}

/// Prices from truthful data: each component of unknown buyers is resolved by
/// one probe at v_H when probing pays; buyers tied to a known buyer are
/// resolved from the start.
fn ulp(graph: &SocialGraph, arrivals: &ArrivalSequence, params: &MarketParams, prices: &mut [Option<f64>]) {
    let n = graph.n_nodes();
    let mut comps = Components::new(n);
    for &(u, v) in &graph.edges {
        if !graph.known[u] && !graph.known[v] {
            comps.union(u, v);
        }
    }
    let mut size: HashMap<usize, usize> = HashMap::new();
    let mut resolved: HashMap<usize, bool> = HashMap::new();
    for u in 0..n {
        if graph.known[u] {
            continue;
        }
        let r = comps.find(u);
        *size.entry(r).or_default() += 1;
        if graph.adj[u].iter().any(|&(v, _)| graph.known[v]) {
            resolved.insert(r, true);
        }
    }
    for &u in arrivals.order() {
        let r = comps.find(u);
        let pref = graph.prefs[u];
        if resolved.get(&r).copied().unwrap_or(false) {
            prices[u] = Some(value(params, pref));
            continue;
        }
        let nc = size[&r] as f64;
        if params.ratio() < nc / (nc + 1.0) {
            prices[u] = Some(params.v_h());
            resolved.insert(r, true);
        } else {
            prices[u] = Some(params.v_l());
        }
    }
}

/// Belief state of the strategic-learning seller.
struct SlpState<'a> {
    graph: &'a SocialGraph,
    comp: Vec<usize>,
    members: HashMap<usize, Vec<usize>>,
    certain: HashMap<usize, bool>,
    s: f64,
    s_known: f64,
    alpha: f64,
}

impl<'a> SlpState<'a> {
    fn new(graph: &'a SocialGraph, params: &'a MarketParams, outcome: &EquilibriumOutcome) -> Self {
        let n = graph.n_nodes();
        let mut dsu = Components::new(n);
        for (e, &(u, v)) in graph.edges.iter().enumerate() {
            if graph.realized(e) == 1 {
                dsu.union(u, v);
            }
        }
        let comp: Vec<usize> = (0..n).map(|u| dsu.find(u)).collect();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for (u, &c) in comp.iter().enumerate() {
            members.entry(c).or_default().push(u);
        }
        let s_known = if hides_known_ties(graph, params) { 0.0 } else { 1.0 };
        let mut st = SlpState {
            graph,
            comp,
            members,
            certain: HashMap::new(),
            s: outcome.belief_s,
            s_known,
            alpha: outcome.alpha,
        };
        for u in 0..n {
            if graph.known[u] {
                st.resolve(st.comp[u], graph.prefs[u].is_high());
            }
        }
        st
    }

    /// Likelihoods of component `c` being all High and all Low given the
    /// observed edges, treating edges as independent.
    fn likelihoods(&self, c: usize) -> (f64, f64) {
        let (a, s) = (self.alpha, self.s);
        let (mut lh, mut ll) = (1.0f64, 1.0f64);
        for &u in &self.members[&c] {
            lh *= a;
            ll *= 1.0 - a;
            for &(v, e) in &self.graph.adj[u] {
                let d = self.comp[v];
                if d == c {
                    if u < v {
                        if self.graph.realized(e) == 1 {
                            lh *= s;
                        } else {
                            lh *= 1.0 - s;
                            ll = 0.0;
                        }
                    }
                    continue;
                }
                let s_e = if self.graph.known[v] || self.graph.known[u] { self.s_known } else { s };
                match self.certain.get(&d) {
                    Some(true) => lh *= 1.0 - s_e,
                    Some(false) => ll = 0.0,
                    None => {
                        lh *= a * (1.0 - s) + (1.0 - a);
                        ll *= a;
                    }
                }
            }
        }
        (lh, ll)
    }

    fn posterior_high(&self, c: usize) -> f64 {
        let (lh, ll) = self.likelihoods(c);
        if lh + ll <= 0.0 || !(lh + ll).is_finite() {
            return self.alpha;
        }
        lh / (lh + ll)
    }

    /// Marks `c` as certain and propagates certainty to neighbors whose
    /// likelihoods become degenerate.
    fn resolve(&mut self, c: usize, high: bool) {
        let mut queue = VecDeque::from([(c, high)]);
        while let Some((c, high)) = queue.pop_front() {
            if self.certain.contains_key(&c) {
                continue;
            }
            self.certain.insert(c, high);
            let mut next = Vec::new();
            for &u in &self.members[&c] {
                for &(v, _) in &self.graph.adj[u] {
                    let d = self.comp[v];
                    if d != c && !self.certain.contains_key(&d) {
                        next.push(d);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            for d in next {
                let (lh, ll) = self.likelihoods(d);
                if ll == 0.0 && lh > 0.0 {
                    queue.push_back((d, true));
                } else if lh == 0.0 && ll > 0.0 {
                    queue.push_back((d, false));
                }
            }
        }
    }
}

fn slp(
    graph: &SocialGraph,
    arrivals: &ArrivalSequence,
    params: &MarketParams,
    outcome: &EquilibriumOutcome,
    rng: &mut impl Rng,
    prices: &mut [Option<f64>],
) {
    let mut st = SlpState::new(graph, params, outcome);
    let (h, lo) = (params.v_h(), params.v_l());
    for &u in arrivals.order() {
        let c = st.comp[u];
        if let Some(&high) = st.certain.get(&c) {
            prices[u] = Some(if high { h } else { lo });
            continue;
        }
        let post = st.posterior_high(c);
        if post == 0.0 || post == 1.0 {
            st.resolve(c, post == 1.0);
            prices[u] = Some(if post == 1.0 { h } else { lo });
            continue;
        }
        let mut price = if post * h >= lo { h } else { lo };
        match (outcome.region, outcome.beta_star) {
            (Region::IV, Some(b)) if price == h && rng.gen::<f64>() < b => price = lo,
            (Region::V, Some(b)) if price == lo && rng.gen::<f64>() < b => price = h,
            _ => {}
        }
        prices[u] = Some(price);
        if price == h {
            st.resolve(c, graph.prefs[u].is_high());
        }
    }
}

/// Runs one pricing mechanism over an arrival order. The strategic-learning
/// seller uses `rng` for its mixed pricing.
pub fn run_mechanism(
    graph: &SocialGraph,
    kind: MechanismKind,
    arrivals: &ArrivalSequence,
    params: &MarketParams,
    rng: &mut impl Rng,
) -> Result<MechanismResult> {
    let checked = ArrivalSequence::new(arrivals.0.clone(), graph)?;
    let mut prices = vec![None; graph.n_nodes()];
    match kind {
        MechanismKind::Nlp => nlp(&checked, params, &mut prices),
        MechanismKind::Ulp => ulp(graph, &checked, params, &mut prices),
        MechanismKind::Slp => {
            let outcome = solve_pbe(params)?;
            slp(graph, &checked, params, &outcome, rng, &mut prices)
        }
    }
    Ok(settle(graph, params, &prices))
}

fn settle(graph: &SocialGraph, params: &MarketParams, prices: &[Option<f64>]) -> MechanismResult {
    let mut payoffs = vec![0.0; graph.n_nodes()];
    let mut revenue = 0.0;
    for (u, p) in prices.iter().enumerate() {
        if let Some(p) = *p {
            let v = value(params, graph.prefs[u]);
            if purchase_decision(v, p) {
                revenue += p;
                payoffs[u] += v - p;
            }
        }
    }
    for (e, &(u, v)) in graph.edges.iter().enumerate() {
        let (xu, xv) = graph.choices[e];
        let (su, sv) = social_utility_unchecked(graph.prefs[u] == graph.prefs[v], xu, xv, params);
        payoffs[u] += su;
        payoffs[v] += sv;
    }
    MechanismResult { revenue, payoffs }
}

/// Mean revenue of each mechanism over independent replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismComparison {
    pub nlp: Estimate,
    pub ulp: Estimate,
    pub slp: Estimate,
}

impl MechanismComparison {
    pub fn get(&self, kind: MechanismKind) -> Estimate {
        match kind {
            MechanismKind::Nlp => self.nlp,
            MechanismKind::Ulp => self.ulp,
            MechanismKind::Slp => self.slp,
        }
    }
}

/// Runs `shuffles` replications on a populated graph. Each draws a fresh
/// manipulation profile and arrival order; undisclosed learning sees the
/// honest graph.
pub fn compare_mechanisms(graph: &SocialGraph, params: &MarketParams, shuffles: u64, seed: u64) -> Result<MechanismComparison> {
    if shuffles == 0 {
        return Err(Error::InvalidInput("shuffle count must be at least 1".into()));
    }
    solve_pbe(params)?;
    let mut honest = graph.clone();
    honest.reset_honest();
    let failure = std::sync::Mutex::new(None);
    let acc = sim::run::<3, _>(shuffles, seed, |rng, acc| {
        let arrivals = ArrivalSequence::shuffled(&honest, rng);
        let result = (|| -> Result<[f64; 3]> {
            let manipulated = manipulate_with(&honest, params, rng)?;
            let n = run_mechanism(&honest, MechanismKind::Nlp, &arrivals, params, rng)?.revenue;
            let u = run_mechanism(&honest, MechanismKind::Ulp, &arrivals, params, rng)?.revenue;
            let s = run_mechanism(&manipulated, MechanismKind::Slp, &arrivals, params, rng)?.revenue;
            Ok([n, u, s])
        })();
        match result {
            Ok(r) => {
                for (m, x) in acc.iter_mut().zip(r) {
                    m.push(x);
                }
            }
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
            }
        }
    });
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(MechanismComparison { nlp: acc[0].estimate(), ulp: acc[1].estimate(), slp: acc[2].estimate() })
}

/// One point of the revenue-versus-v_H sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub v_h: f64,
    pub region: Region,
    pub rho_star: f64,
    pub revenue: MechanismComparison,
}

/// Sweeps `v_H` over `steps` evenly spaced points in `(0, vh_max]` at a fixed
/// `v_L/v_H` ratio.
pub fn revenue_sweep(
    graph: &SocialGraph,
    ratio: f64,
    l: f64,
    vh_max: f64,
    steps: usize,
    shuffles: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if steps == 0 || !(vh_max > 0.0) {
        return Err(Error::InvalidInput("sweep needs at least one step and a positive v_H range".into()));
    }
    (1..=steps)
        .map(|k| {
            let v_h = vh_max * k as f64 / steps as f64;
            let params = MarketParams::new(v_h, ratio * v_h, l)?;
            let outcome = solve_pbe(&params)?;
            let revenue = compare_mechanisms(graph, &params, shuffles, seed.wrapping_add(k as u64))?;
            Ok(SweepPoint { v_h, region: outcome.region, rho_star: outcome.rho_star, revenue })
        })
        .collect()
}

/// Seller prices in the three-buyer game with a known High buyer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StagePrice {
    /// v_L to both unknown buyers.
    BothLow,
    /// v_H to both unknown buyers.
    BothHigh,
    /// v_L to buyer i.
    LowForI,
}

/// A pure-strategy equilibrium of the triangle with known High buyer k and
/// unknown buyers i, j (`v_i ≤ v_j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureCase {
    pub case: u8,
    pub condition: &'static str,
    /// `x_jk` when `v_i ≠ v_j = v_H`.
    pub mixed_x_jk: u8,
    /// `(x_ij, x_ik, x_ji, x_jk)` when both unknown buyers are High.
    pub both_high: [u8; 4],
    /// Prices keyed on `(x̂_ij, x̂_ik, x̂_jk)`.
    pub prices: Vec<([u8; 3], StagePrice)>,
    /// The seller earns the same as without the known buyer.
    pub no_revenue_gain: bool,
}

/// Pure-strategy equilibria whose conditions hold at `params`.
pub fn three_buyer_pbe_known_high(params: &MarketParams) -> Vec<PureCase> {
    let d = params.spread();
    let one_l = 1.0 - params.l();
    let ratio = params.ratio();
    let shared = d > one_l && ratio > 2.0 / 3.0;
    let low_pair = ([1, 0, 0], StagePrice::BothLow);
    let mut out = Vec::new();
    if d >= 2.0 * one_l && ratio >= 1.0 / 3.0 {
        out.push(PureCase {
            case: 1,
            condition: "v_H − v_L ≥ 2(1−l) and v_L/v_H ≥ 1/3",
            mixed_x_jk: 1,
            both_high: [1, 1, 0, 0],
            prices: vec![low_pair, ([0, 0, 1], StagePrice::LowForI)],
            no_revenue_gain: false,
        });
    }
    if d < 2.0 * one_l {
        out.push(PureCase {
            case: 2,
            condition: "v_H − v_L < 2(1−l)",
            mixed_x_jk: 1,
            both_high: [1, 1, 1, 1],
            prices: vec![low_pair, ([0, 0, 1], StagePrice::LowForI), ([1, 1, 1], StagePrice::BothHigh)],
            no_revenue_gain: false,
        });
    }
    if shared {
        out.push(PureCase {
            case: 3,
            condition: "v_H − v_L > 1−l and v_L/v_H > 2/3",
            mixed_x_jk: 1,
            both_high: [1, 0, 1, 0],
            prices: vec![low_pair, ([0, 0, 1], StagePrice::LowForI)],
            no_revenue_gain: false,
        });
        out.push(PureCase {
            case: 4,
            condition: "v_H − v_L > 1−l and v_L/v_H > 2/3",
            mixed_x_jk: 0,
            both_high: [1, 1, 1, 1],
            prices: vec![low_pair, ([0, 0, 0], StagePrice::BothLow)],
            no_revenue_gain: false,
        });
        out.push(PureCase {
            case: 5,
            condition: "v_H − v_L > 1−l and v_L/v_H > 2/3",
            mixed_x_jk: 0,
            both_high: [1, 0, 1, 0],
            prices: vec![low_pair, ([0, 0, 0], StagePrice::BothLow)],
            no_revenue_gain: true,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(h: f64, lo: f64, l: f64) -> MarketParams {
        MarketParams::new(h, lo, l).unwrap()
    }

    #[test]
    fn path_graph() {
        let g = load_edge_list_str("0 1\n1 2\n").unwrap();
        assert_eq!((g.n_nodes(), g.n_edges()), (3, 2));
    }

    #[test]
    fn loader_errors_carry_line_numbers() {
        match load_edge_list_str("0 0\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match load_edge_list_str("# c\n0 1\n1 x\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn loader_dedupes_and_compacts() {
        let g = load_edge_list_str("10 20\n20 10\n# note\n\n20 30\n").unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.ids(), &[10, 20, 30]);
    }

    #[test]
    fn preference_extremes() {
        let g = load_edge_list_str("0 1\n1 2\n").unwrap();
        assert!(sample_preferences(&g, 0.0, 1).unwrap().preferences().iter().all(|p| !p.is_high()));
        assert!(sample_preferences(&g, 1.0, 1).unwrap().preferences().iter().all(|p| p.is_high()));
    }

    #[test]
    fn no_gain_examples() {
        assert!(no_gain_condition(2, 1, &mp(3.0, 2.2, 0.5)));
        assert!(!no_gain_condition(2, 1, &mp(3.0, 1.9, 0.5)));
        assert!(!no_gain_condition(2, 4, &mp(3.0, 2.2, 0.5)));
    }

    #[test]
    fn three_buyer_cases() {
        let cases = three_buyer_pbe_known_high(&mp(3.0, 2.2, 0.5));
        assert!(cases.iter().any(|c| c.no_revenue_gain));
        let c2 = three_buyer_pbe_known_high(&mp(3.0, 2.5, 0.5));
        let case2 = c2.iter().find(|c| c.case == 2).unwrap();
        assert_eq!(case2.both_high, [1, 1, 1, 1]);
        assert!(three_buyer_pbe_known_high(&mp(3.0, 0.9, 0.5)).is_empty());
    }

    #[test]
    fn arrival_sequence_validated() {
        let g = load_edge_list_str("0 1\n1 2\n").unwrap();
        assert!(ArrivalSequence::new(vec![0, 1], &g).is_err());
        assert!(ArrivalSequence::new(vec![2, 0, 1], &g).is_ok());
    }

    #[test]
    fn region_one_is_honest() {
        let g = load_edge_list_str("0 1\n1 2\n2 0\n").unwrap();
        let g = sample_preferences(&g, 1.0, 3).unwrap();
        let m = apply_manipulation(&g, &mp(3.0, 2.5, 0.5), 9).unwrap();
        assert!((0..m.n_edges()).all(|e| m.realized(e) == m.truthful(e)));
    }
}
