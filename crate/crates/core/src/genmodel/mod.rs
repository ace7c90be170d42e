//! Growth model with logical and societal links.
//!
//! Each new node receives a random field vector and repeats process A:
//! pick a logical target by preferential attachment (`k_in + a`) among
//! existing nodes whose vectors have cosine similarity above `w`, link to
//! each of the target's neighbours with probability `q` (societal links),
//! and stop with probability `p`.

mod calibrate;

pub use calibrate::{calibrate, CalibrationOutcome, CalibrationSpec, Candidate};

use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Digraph, FieldVector, GraphBuilder, NodeId, NodeMeta, FIELD_DIMS};
use crate::stats::{derive_seed, rng};

const CLASSES: usize = 1 << FIELD_DIMS;

/// `popcount(u & v) / sqrt(|u|·|v|)`: the cosine of two binary vectors.
pub fn cosine_similarity(u: FieldVector, v: FieldVector) -> Result<f64> {
    if u.is_zero() || v.is_zero() {
        return Err(Error::InvalidArgument("cosine similarity of a zero vector".into()));
    }
    Ok(cosine_bits(u.bits(), v.bits()))
}

fn cosine_bits(u: u16, v: u16) -> f64 {
    f64::from((u & v).count_ones()) / (f64::from(u.count_ones()) * f64::from(v.count_ones())).sqrt()
}

/// A nonzero vector with each component set with probability `density`.
pub fn random_field_vector(rng: &mut impl Rng, density: f64) -> FieldVector {
    loop {
        let mut bits = 0u16;
        for d in 0..FIELD_DIMS {
            if rng.gen_bool(density) {
                bits |= 1 << d;
            }
        }
        if bits != 0 {
            return FieldVector::from_bits(bits);
        }
    }
}

pub const DEFAULT_VECTOR_DENSITY: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Stop probability of process A.
    pub p: f64,
    /// Local-world similarity threshold (strict).
    pub w: f64,
    /// Initial attractiveness.
    pub a: f64,
    /// Societal copying probability.
    pub q: f64,
    pub dims: usize,
    pub vector_density: f64,
    pub target_n: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn new(p: f64, w: f64, a: f64, q: f64, target_n: usize, seed: u64) -> Self {
        GenParams {
            p,
            w,
            a,
            q,
            dims: FIELD_DIMS,
            vector_density: DEFAULT_VECTOR_DENSITY,
            target_n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad("p must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.w) {
            return bad("w must lie in [0, 1]");
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return bad("a must be a finite non-negative number");
        }
        if !(0.0..=1.0).contains(&self.q) {
            return bad("q must lie in [0, 1]");
        }
        if self.dims != FIELD_DIMS {
            return Err(Error::InvalidArgument(format!("only {FIELD_DIMS}-dimensional vectors are supported")));
        }
        if !(self.vector_density > 0.0 && self.vector_density < 1.0) {
            return bad("vector density must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Parameter sets tuned against the three empirical networks. Each grows
/// `synthetic_seed_graph(DEFAULT_SEED_NODES, DEFAULT_VECTOR_DENSITY, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Theorem,
    MathCitation,
    HepTh,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Theorem, Preset::MathCitation, Preset::HepTh];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Theorem => "theorem",
            Preset::MathCitation => "math-citation",
            Preset::HepTh => "hep-th",
        }
    }

    pub fn params(self, seed: u64) -> GenParams {
        match self {
            Preset::Theorem => GenParams::new(0.048, 0.7, 5.0, 0.0, 26_426, seed),
            Preset::MathCitation => GenParams::new(0.37, 0.7, 1.0, 0.028, 39_028, seed),
            Preset::HepTh => GenParams::new(0.65, 0.7, 0.5, 0.125, 27_400, seed),
        }
    }

    /// Link count of the network the preset imitates.
    pub fn target_m(self) -> usize {
        match self {
            Preset::Theorem => 466_480,
            Preset::MathCitation => 171_679,
            Preset::HepTh => 354_259,
        }
    }

    pub fn seed_graph(self) -> Result<Dag> {
        synthetic_seed_graph(DEFAULT_SEED_NODES, DEFAULT_VECTOR_DENSITY, 0)
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown preset '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkKind {
    Logical,
    Societal,
}

impl LinkKind {
    pub fn code(self) -> char {
        match self {
            LinkKind::Logical => 'L',
            LinkKind::Societal => 'S',
        }
    }
}

/// A generated DAG; `kinds[k]` and `births[k]` describe the k-th edge in
/// `dag.edges()` order. Seed-graph edges are logical with birth 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDag {
    pub dag: Dag,
    pub kinds: Vec<LinkKind>,
    pub births: Vec<u32>,
    /// Nodes below this index come from the seed graph.
    pub seed_nodes: usize,
}

impl LabeledDag {
    pub fn labeled_edges(&self) -> impl Iterator<Item = (NodeId, NodeId, LinkKind, u32)> + '_ {
        self.dag
            .edges()
            .zip(self.kinds.iter().zip(&self.births))
            .map(|((s, t), (&k, &b))| (s, t, k, b))
    }

    /// Writes `source target L|S birth` rows after a comment header.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# Labeled generated graph")?;
        writeln!(out, "# Nodes: {} Edges: {}", self.dag.node_count(), self.dag.edge_count())?;
        writeln!(out, "# FromNodeId\tToNodeId\tKind\tBirth")?;
        for (s, t, k, b) in self.labeled_edges() {
            writeln!(out, "{s}\t{t}\t{}\t{b}", k.code())?;
        }
        Ok(())
    }

    /// Reads the layout written by [`LabeledDag::write_edge_list`] over `meta`'s nodes.
    pub fn read_edge_list<R: BufRead>(src: R, meta: NodeMeta, seed_nodes: usize) -> Result<LabeledDag> {
        let n = meta.labels.len();
        let mut rows = Vec::new();
        crate::ingest::edgelist::read_rows(src, |line, s, t, rest| {
            let kind = match rest.first() {
                Some(&"L") => LinkKind::Logical,
                Some(&"S") => LinkKind::Societal,
                _ => return Err(Error::parse(line, "third column must be L or S")),
            };
            let birth = rest
                .get(1)
                .and_then(|b| b.parse::<u32>().ok())
                .ok_or_else(|| Error::parse(line, "fourth column must be a birth timestep"))?;
            if s as usize >= n || t as usize >= n {
                return Err(Error::parse(line, format!("node index out of range for {n} nodes")));
            }
            rows.push((NodeId(s as u32), NodeId(t as u32), kind, birth));
            Ok(())
        })?;
        rows.sort_by_key(|r| (r.0, r.1));
        if rows.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidArgument("labeled edge list repeats an edge".into()));
        }
        let pairs: Vec<(NodeId, NodeId)> = rows.iter().map(|r| (r.0, r.1)).collect();
        let dag = Dag::try_from_digraph(Digraph::from_sorted_edges(n, &pairs, meta))?;
        Ok(LabeledDag {
            dag,
            kinds: rows.iter().map(|r| r.2).collect(),
            births: rows.iter().map(|r| r.3).collect(),
            seed_nodes,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkTypeStats {
    pub node_count: usize,
    pub link_count: usize,
    pub generated_nodes: usize,
    /// Links created by generated nodes.
    pub generated_links: usize,
    pub logical_links: usize,
    pub societal_links: usize,
    /// Societal share of generated links.
    pub societal_fraction: f64,
    /// Entry k counts generated nodes with k logical out-links.
    pub logical_out_histogram: Vec<usize>,
    pub at_most_two_logical_fraction: f64,
}

/// Link-type counts over the generated part of the graph.
pub fn link_type_stats(g: &LabeledDag) -> LinkTypeStats {
    let n = g.dag.node_count();
    let mut logical_out = vec![0usize; n];
    let (mut logical, mut societal) = (0, 0);
    for (s, _, kind, _) in g.labeled_edges() {
        if s.index() < g.seed_nodes {
            continue;
        }
        match kind {
            LinkKind::Logical => {
                logical += 1;
                logical_out[s.index()] += 1;
            }
            LinkKind::Societal => societal += 1,
        }
    }
    let generated = &logical_out[g.seed_nodes.min(n)..];
    let mut histogram = vec![0usize; generated.iter().copied().max().map_or(0, |m| m + 1)];
    for &k in generated {
        histogram[k] += 1;
    }
    let generated_links = logical + societal;
    let low = generated.iter().filter(|&&k| k <= 2).count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    LinkTypeStats {
        node_count: n,
        link_count: g.dag.edge_count(),
        generated_nodes: generated.len(),
        generated_links,
        logical_links: logical,
        societal_links: societal,
        societal_fraction: ratio(societal, generated_links),
        logical_out_histogram: histogram,
        at_most_two_logical_fraction: ratio(low, generated.len()),
    }
}

/// Growing graph with nodes bucketed by field vector.
struct World {
    vectors: Vec<u16>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    members: Vec<Vec<u32>>,
    /// One entry per in-link received by a member.
    stubs: Vec<Vec<u32>>,
    occupied: Vec<u16>,
    /// `linked[v] == t + 1` when the node being added at step t links to v.
    linked: Vec<u32>,
    edges: Vec<(u32, u32, LinkKind, u32)>,
}

impl World {
    fn new(capacity: usize) -> Self {
        World {
            vectors: Vec::with_capacity(capacity),
            succ: Vec::with_capacity(capacity),
            pred: Vec::with_capacity(capacity),
            members: vec![Vec::new(); CLASSES],
            stubs: vec![Vec::new(); CLASSES],
            occupied: Vec::new(),
            linked: Vec::with_capacity(capacity),
            edges: Vec::new(),
        }
    }

    fn push_node(&mut self, v: FieldVector) -> u32 {
        let id = self.vectors.len() as u32;
        self.vectors.push(v.bits());
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        self.linked.push(0);
        id
    }

    fn enter_class(&mut self, id: u32) {
        let c = self.vectors[id as usize] as usize;
        if self.members[c].is_empty() {
            self.occupied.push(c as u16);
        }
        self.members[c].push(id);
    }

    fn link(&mut self, s: u32, t: u32, kind: LinkKind, birth: u32) {
        self.succ[s as usize].push(t);
        self.pred[t as usize].push(s);
        self.stubs[self.vectors[t as usize] as usize].push(t);
        self.edges.push((s, t, kind, birth));
    }

    fn weight(&self, c: usize, a: f64) -> f64 {
        self.stubs[c].len() as f64 + a * self.members[c].len() as f64
    }

    /// Preferential pick over the classes in `world`.
    fn pick(&self, world: &[u16], a: f64, rng: &mut ChaCha8Rng) -> u32 {
        let total: f64 = world.iter().map(|&c| self.weight(c as usize, a)).sum();
        if total <= 0.0 {
            let size: usize = world.iter().map(|&c| self.members[c as usize].len()).sum();
            let mut r = rng.gen_range(0..size);
            for &c in world {
                let m = &self.members[c as usize];
                if r < m.len() {
                    return m[r];
                }
                r -= m.len();
            }
            unreachable!("index within world size");
        }
        let mut r = rng.gen::<f64>() * total;
        let mut chosen = *world.last().unwrap() as usize;
        for &c in world {
            let wc = self.weight(c as usize, a);
            if r < wc {
                chosen = c as usize;
                break;
            }
            r -= wc;
        }
        let members = &self.members[chosen];
        let stubs = &self.stubs[chosen];
        let uniform_part = a * members.len() as f64;
        if stubs.is_empty() || r < uniform_part {
            members[rng.gen_range(0..members.len())]
        } else {
            stubs[rng.gen_range(0..stubs.len())]
        }
    }
}

/// The default seed: `n` nodes with random vectors; node i > 0 cites
/// min(i, 1 + Geometric(1/2)) distinct earlier nodes chosen uniformly.
pub fn synthetic_seed_graph(n: usize, vector_density: f64, seed: u64) -> Result<Dag> {
    let mut r = rng(seed);
    let mut meta = NodeMeta::empty(n);
    for f in meta.fields.iter_mut() {
        *f = Some(random_field_vector(&mut r, vector_density));
    }
    let mut b = GraphBuilder::new(n).with_meta(meta);
    for i in 1..n {
        let mut k = 1;
        while r.gen_bool(0.5) {
            k += 1;
        }
        for j in rand::seq::index::sample(&mut r, i, k.min(i)) {
            b.add_edge(i, j)?;
        }
    }
    Dag::try_from_digraph(b.build().0)
}

pub const DEFAULT_SEED_NODES: usize = 100;

/// Grows `seed_graph` to `params.target_n` nodes. Seed nodes lacking a field
/// vector get a random one drawn from the run's seed.
pub fn generate(params: &GenParams, seed_graph: &Dag) -> Result<LabeledDag> {
    params.validate()?;
    let s = seed_graph.node_count();
    if params.target_n <= s {
        return Err(Error::InvalidArgument(format!(
            "target size {} must exceed the seed graph's {s} nodes",
            params.target_n
        )));
    }
    let mut vec_rng = rng(derive_seed(params.seed, 0));
    let mut r = rng(derive_seed(params.seed, 1));
    let n = params.target_n;
    let mut world = World::new(n);
    for v in seed_graph.nodes() {
        let f = seed_graph
            .field(v)
            .filter(|f| !f.is_zero())
            .unwrap_or_else(|| random_field_vector(&mut vec_rng, params.vector_density));
        world.push_node(f);
    }
    for (u, v) in seed_graph.edges() {
        world.link(u.0, v.0, LinkKind::Logical, 0);
    }
    for v in 0..s as u32 {
        world.enter_class(v);
    }

    let mut local: Vec<u16> = Vec::with_capacity(CLASSES);
    let mut neighbours: Vec<u32> = Vec::new();
    let log_keep = (1.0 - params.q).ln();
    for step in 1..=(n - s) as u32 {
        let f = random_field_vector(&mut vec_rng, params.vector_density);
        let new = world.push_node(f);
        let stamp = step;
        local.clear();
        local.extend(
            world
                .occupied
                .iter()
                .copied()
                .filter(|&c| cosine_bits(c, f.bits()) > params.w),
        );
        if local.is_empty() {
            local.extend_from_slice(&world.occupied);
        }
        loop {
            let target = world.pick(&local, params.a, &mut r);
            if world.linked[target as usize] != stamp {
                world.linked[target as usize] = stamp;
                world.link(new, target, LinkKind::Logical, step);
            }
            if params.q > 0.0 {
                neighbours.clear();
                neighbours.extend(world.pred[target as usize].iter().copied().filter(|&x| x != new));
                neighbours.extend_from_slice(&world.succ[target as usize]);
                // geometric skips visit each candidate with probability q
                let len = neighbours.len();
                let mut i = 0usize;
                while i < len {
                    if params.q < 1.0 {
                        let u: f64 = 1.0 - r.gen::<f64>();
                        let skip = (u.ln() / log_keep).floor();
                        if skip >= (len - i) as f64 {
                            break;
                        }
                        i += skip as usize;
                    }
                    let c = neighbours[i];
                    if world.linked[c as usize] != stamp {
                        world.linked[c as usize] = stamp;
                        world.link(new, c, LinkKind::Societal, step);
                    }
                    i += 1;
                }
            }
            if r.gen_bool(params.p) {
                break;
            }
        }
        world.enter_class(new);
    }

    let mut meta = NodeMeta::empty(n);
    for (k, &bits) in world.vectors.iter().enumerate() {
        meta.fields[k] = Some(FieldVector::from_bits(bits));
        if k < s {
            meta.labels[k] = seed_graph.label(NodeId::from(k)).map(str::to_owned);
            meta.dates[k] = seed_graph.date(NodeId::from(k));
        }
    }
    let mut edges = world.edges;
    edges.sort_unstable_by_key(|e| (e.0, e.1));
    let pairs: Vec<(NodeId, NodeId)> = edges.iter().map(|e| (NodeId(e.0), NodeId(e.1))).collect();
    // every edge points from a newer node to an older one
    debug_assert!(edges.iter().all(|e| e.0 > e.1 || (e.0 as usize) < s));
    let dag = Dag::try_from_digraph(Digraph::from_sorted_edges(n, &pairs, meta))?;
    Ok(LabeledDag {
        dag,
        kinds: edges.iter().map(|e| e.2).collect(),
        births: edges.iter().map(|e| e.3).collect(),
        seed_nodes: s,
    })
}
