//! Exhaustive verification over finite concept spaces.
//!
//! A [`FiniteSpace`] lists every concept of a schema whose domains are all
//! finite, together with the full order relation stored as bit rows. Meets and
//! joins are then found by brute force from the bound sets, independently of
//! the algebra in [`crate::order`], which makes the space usable as an oracle.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::order::{subsumes, Concept, MeetJoinResult};
use crate::schema::{FeatureSchema, Property, ValueDomain};
use crate::wire;

/// Spaces larger than this are refused by [`FiniteSpace::enumerate`].
pub const MAX_SPACE: u128 = 2_000_000;

#[derive(Debug, Clone)]
struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Bits {
            words,
            data: vec![0; rows * words],
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn count(a: &[u64]) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

fn members(a: &[u64]) -> impl Iterator<Item = usize> + '_ {
    a.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let t = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(w * 64 + t)
        })
    })
}

/// Every concept of a finite schema, with the order relation precomputed.
#[derive(Debug, Clone)]
pub struct FiniteSpace {
    schema: Arc<FeatureSchema>,
    concepts: Vec<Concept>,
    // up[i] has bit j set iff concepts[i] <= concepts[j]; down is its transpose.
    up: Bits,
    down: Bits,
    index: HashMap<String, usize>,
}

fn options(domain: &ValueDomain, name: &str) -> Result<Vec<Property>> {
    Ok(match domain {
        ValueDomain::Discrete { symbols } => symbols
            .iter()
            .map(|s| Property::Symbol(s.clone()))
            .collect(),
        ValueDomain::Disjunctive { symbols } => {
            let syms: Vec<&String> = symbols.iter().collect();
            if syms.len() > 20 {
                return Err(Error::Config(format!(
                    "disjunctive feature `{name}` has too many symbols to enumerate"
                )));
            }
            let mut masks: Vec<u32> = (1..(1u32 << syms.len())).collect();
            masks.sort_by_key(|m| (m.count_ones(), *m));
            masks
                .into_iter()
                .map(|m| {
                    Property::SymbolSet(
                        syms.iter()
                            .enumerate()
                            .filter(|(i, _)| m >> i & 1 == 1)
                            .map(|(_, s)| (*s).clone())
                            .collect(),
                    )
                })
                .collect()
        }
        ValueDomain::Partition { cutoffs } => (0..=cutoffs.len()).map(Property::Bucket).collect(),
        _ => return Err(Error::InfiniteDomain(name.to_string())),
    })
}

impl FiniteSpace {
    /// Enumerates all concepts (value-or-absent on every feature), varying
    /// the last feature fastest. The universal concept comes first.
    pub fn enumerate(schema: Arc<FeatureSchema>) -> Result<Self> {
        let per_feature = schema
            .features()
            .iter()
            .map(|f| options(&f.domain, &f.name))
            .collect::<Result<Vec<_>>>()?;
        let total = per_feature
            .iter()
            .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128 + 1))
            .filter(|&n| n <= MAX_SPACE)
            .ok_or_else(|| Error::Config(format!("space exceeds {MAX_SPACE} concepts")))?;
        let mut concepts = Vec::with_capacity(total as usize);
        let mut choice = vec![0usize; per_feature.len()];
        loop {
            let entries = choice
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(f, &k)| (schema.features()[f].id, per_feature[f][k - 1].clone()));
            concepts.push(Concept::new(schema.clone(), entries)?);
            // odometer increment, last feature fastest
            let mut f = per_feature.len();
            loop {
                if f == 0 {
                    return FiniteSpace::from_concepts(schema, concepts);
                }
                f -= 1;
                choice[f] += 1;
                if choice[f] <= per_feature[f].len() {
                    break;
                }
                choice[f] = 0;
            }
        }
    }

    /// Builds a space from an explicit concept list, which may be any subset
    /// of a schema's concepts (duplicates are kept, so axiom checks can see
    /// them).
    pub fn from_concepts(schema: Arc<FeatureSchema>, concepts: Vec<Concept>) -> Result<Self> {
        let n = concepts.len();
        if concepts
            .iter()
            .any(|c| !crate::order::same_schema(c.schema(), &schema))
        {
            return Err(Error::SchemaMismatch);
        }
        let rows: Vec<Vec<u64>> = concepts
            .par_iter()
            .map(|c| {
                let mut row = vec![0u64; n.div_ceil(64).max(1)];
                for (j, d) in concepts.iter().enumerate() {
                    if subsumes(c, d).unwrap_or(false) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        let mut up = Bits::new(n, n);
        let mut down = Bits::new(n, n);
        for (i, row) in rows.iter().enumerate() {
            up.data[i * up.words..(i + 1) * up.words].copy_from_slice(row);
            for j in members(row) {
                down.data[j * down.words + i / 64] |= 1 << (i % 64);
            }
        }
        let mut index = HashMap::new();
        for (i, c) in concepts.iter().enumerate() {
            index.entry(wire::concept_key(c)).or_insert(i);
        }
        Ok(FiniteSpace {
            schema,
            concepts,
            up,
            down,
            index,
        })
    }

    pub fn schema(&self) -> &Arc<FeatureSchema> {
        &self.schema
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// `concepts[i] <= concepts[j]` from the precomputed relation.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up.get(i, j)
    }

    pub fn index_of(&self, c: &Concept) -> Result<usize> {
        if !crate::order::same_schema(&self.schema, c.schema()) {
            return Err(Error::NotInSpace);
        }
        self.index
            .get(&wire::concept_key(c))
            .copied()
            .ok_or(Error::NotInSpace)
    }

    fn greatest(&self, set: &[u64]) -> Option<usize> {
        // A greatest element has the most elements below it; only that
        // candidate needs checking.
        let g = members(set).max_by_key(|&g| count(self.down.row(g)))?;
        subset(set, self.down.row(g)).then_some(g)
    }

    fn least(&self, set: &[u64]) -> Option<usize> {
        let l = members(set).max_by_key(|&l| count(self.up.row(l)))?;
        subset(set, self.up.row(l)).then_some(l)
    }

    /// Index of the greatest lower bound of `i` and `j`, if one exists.
    pub fn meet_index(&self, i: usize, j: usize) -> Option<usize> {
        self.greatest(&and(self.down.row(i), self.down.row(j)))
    }

    /// Index of the least upper bound of `i` and `j`, if one exists.
    pub fn join_index(&self, i: usize, j: usize) -> Option<usize> {
        self.least(&and(self.up.row(i), self.up.row(j)))
    }

    /// Least upper bound of a set of indices (the empty set's is the bottom).
    pub fn lub(&self, items: &[usize]) -> Option<usize> {
        let mut ub = vec![u64::MAX; self.up.words];
        let n = self.len();
        if !n.is_multiple_of(64) {
            ub[self.up.words - 1] = (1u64 << (n % 64)) - 1;
        }
        if n == 0 {
            return None;
        }
        for &i in items {
            ub = and(&ub, self.up.row(i));
        }
        self.least(&ub)
    }

    /// Covering pairs `(i, j)`: `i < j` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                members(self.up.row(i))
                    .filter(move |&j| j != i && !self.leq(j, i))
                    .filter(move |&j| count(&and(self.up.row(i), self.down.row(j))) == 2)
                    .map(move |j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

/// Brute-force meet of two members of the space.
pub fn oracle_meet(space: &FiniteSpace, c: &Concept, d: &Concept) -> Result<Concept> {
    let (i, j) = (space.index_of(c)?, space.index_of(d)?);
    space
        .meet_index(i, j)
        .map(|m| space.concepts[m].clone())
        .ok_or_else(|| Error::Config("pair has no greatest lower bound".into()))
}

/// Brute-force join; `Undefined` when there is no upper bound or no least one.
pub fn oracle_join(space: &FiniteSpace, c: &Concept, d: &Concept) -> Result<MeetJoinResult> {
    let (i, j) = (space.index_of(c)?, space.index_of(d)?);
    Ok(match space.join_index(i, j) {
        Some(k) => MeetJoinResult::Defined(space.concepts[k].clone()),
        None => MeetJoinResult::Undefined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    /// Spaces up to this size get exhaustive chain enumeration.
    pub exhaustive_limit: usize,
    /// Enumeration falls back to sampling past this many maximal chains.
    pub max_chains: usize,
    /// Chains drawn when sampling.
    pub sample_chains: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            exhaustive_limit: 10_000,
            max_chains: 200_000,
            sample_chains: 2_000,
            seed: 0x5eed,
        }
    }
}

/// Verdict on one law, with a witness when it fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Vec<Concept>>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(witness: Vec<Concept>) -> Self {
        Verdict {
            holds: false,
            counterexample: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub size: usize,
    pub reflexive: Verdict,
    pub antisymmetric: Verdict,
    pub transitive: Verdict,
    pub is_meet_semilattice: Verdict,
    pub has_bottom: bool,
    /// True when every pair has a join (never the case for a topless space
    /// with clashing values).
    pub join_total: bool,
    pub maximal_elements: Vec<Concept>,
    /// Maximal elements coincide with the fully specified concepts.
    pub maximal_are_total: bool,
    pub cpo_chain_check: Verdict,
    pub chains_checked: usize,
    pub chains_sampled: bool,
}

impl CheckReport {
    /// All order axioms, the meet-semilattice property, the bottom and the
    /// chain condition hold.
    pub fn is_cpo(&self) -> bool {
        self.reflexive.holds
            && self.antisymmetric.holds
            && self.transitive.holds
            && self.has_bottom
            && self.cpo_chain_check.holds
    }
}

fn fully_specified(c: &Concept) -> bool {
    c.is_total()
        && c.entries().all(|(_, p)| match p {
            Property::SymbolSet(s) => s.len() == 1,
            _ => true,
        })
}

/// Checks the order axioms, semilattice and CPO structure of a finite space.
pub fn check_axioms(space: &FiniteSpace, config: &CheckConfig) -> CheckReport {
    let n = space.len();
    let cs = &space.concepts;

    let reflexive = (0..n)
        .find(|&i| !space.leq(i, i))
        .map_or_else(Verdict::pass, |i| Verdict::fail(vec![cs[i].clone()]));

    let antisymmetric = (0..n)
        .flat_map(|i| members(space.up.row(i)).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && space.leq(j, i))
        .map_or_else(Verdict::pass, |(i, j)| {
            Verdict::fail(vec![cs[i].clone(), cs[j].clone()])
        });

    // i <= j requires up(j) ⊆ up(i).
    let transitive = (0..n)
        .flat_map(|i| members(space.up.row(i)).map(move |j| (i, j)))
        .find(|&(i, j)| !subset(space.up.row(j), space.up.row(i)))
        .map_or_else(Verdict::pass, |(i, j)| {
            let k = members(space.up.row(j))
                .find(|&k| !space.leq(i, k))
                .expect("witness exists");
            Verdict::fail(vec![cs[i].clone(), cs[j].clone(), cs[k].clone()])
        });

    let missing_meet = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| (i..n).map(move |j| (i, j)))
        .find_first(|&(i, j)| space.meet_index(i, j).is_none());
    let is_meet_semilattice = missing_meet.map_or_else(Verdict::pass, |(i, j)| {
        Verdict::fail(vec![cs[i].clone(), cs[j].clone()])
    });

    let join_total = (0..n)
        .into_par_iter()
        .all(|i| (i..n).all(|j| space.join_index(i, j).is_some()));

    let has_bottom = space.lub(&[]).is_some();

    let maximal: Vec<usize> = (0..n)
        .filter(|&i| members(space.up.row(i)).all(|j| space.leq(j, i)))
        .collect();
    let maximal_elements: Vec<Concept> = maximal.iter().map(|&i| cs[i].clone()).collect();
    let total: Vec<usize> = (0..n).filter(|&i| fully_specified(&cs[i])).collect();
    let maximal_are_total = maximal == total;

    let (cpo_chain_check, chains_checked, chains_sampled) = check_chains(space, config, has_bottom);

    CheckReport {
        size: n,
        reflexive,
        antisymmetric,
        transitive,
        is_meet_semilattice,
        has_bottom,
        join_total,
        maximal_elements,
        maximal_are_total,
        cpo_chain_check,
        chains_checked,
        chains_sampled,
    }
}

fn check_chains(
    space: &FiniteSpace,
    config: &CheckConfig,
    has_bottom: bool,
) -> (Verdict, usize, bool) {
    if !has_bottom {
        // the empty chain has no least upper bound
        return (Verdict::fail(vec![]), 1, false);
    }
    let n = space.len();
    let mut up_covers: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_lower_cover = vec![false; n];
    for (i, j) in space.covers() {
        up_covers[i].push(j);
        has_lower_cover[j] = true;
    }
    for v in &mut up_covers {
        v.sort_unstable();
    }
    let minimal: Vec<usize> = (0..n).filter(|&i| !has_lower_cover[i]).collect();

    // Every prefix of a chain must have its top element as least upper bound.
    let chain_ok = |chain: &[usize]| -> std::result::Result<(), Vec<Concept>> {
        for k in 1..=chain.len() {
            if space.lub(&chain[..k]) != Some(chain[k - 1]) {
                return Err(chain[..k]
                    .iter()
                    .map(|&i| space.concepts[i].clone())
                    .collect());
            }
        }
        Ok(())
    };

    let mut checked = 0usize;
    if n <= config.exhaustive_limit {
        let mut stack: Vec<Vec<usize>> = minimal.iter().map(|&m| vec![m]).collect();
        let mut exhausted = true;
        while let Some(chain) = stack.pop() {
            let last = *chain.last().expect("non-empty chain");
            if up_covers[last].is_empty() {
                if let Err(w) = chain_ok(&chain) {
                    return (Verdict::fail(w), checked + 1, false);
                }
                checked += 1;
                if checked >= config.max_chains {
                    exhausted = false;
                    break;
                }
                continue;
            }
            for &next in up_covers[last].iter().rev() {
                let mut longer = chain.clone();
                longer.push(next);
                stack.push(longer);
            }
        }
        if exhausted {
            return (Verdict::pass(), checked, false);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sampled = 0usize;
    for _ in 0..config.sample_chains {
        let Some(&start) = minimal.choose(&mut rng) else {
            break;
        };
        let mut chain = vec![start];
        while let Some(&next) = up_covers[*chain.last().expect("non-empty")].choose(&mut rng) {
            chain.push(next);
        }
        if let Err(w) = chain_ok(&chain) {
            return (Verdict::fail(w), checked + sampled + 1, true);
        }
        sampled += 1;
    }
    (Verdict::pass(), checked + sampled, true)
}

/// Covering graph of a finite space, laid out bottom-up.
#[derive(Debug, Clone)]
pub struct HasseDiagram {
    /// Nodes ordered by number of specified features, then by serialized form.
    pub nodes: Vec<Concept>,
    /// Covering edges `(lower, upper)` as node indices.
    pub edges: Vec<(usize, usize)>,
}

pub fn hasse(space: &FiniteSpace) -> HasseDiagram {
    let mut order: Vec<(usize, String, usize)> = space
        .concepts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.len(), wire::concept_key(c), i))
        .collect();
    order.sort();
    let mut position = vec![0usize; space.len()];
    for (pos, (_, _, i)) in order.iter().enumerate() {
        position[*i] = pos;
    }
    let mut edges: Vec<(usize, usize)> = space
        .covers()
        .into_iter()
        .map(|(i, j)| (position[i], position[j]))
        .collect();
    edges.sort_unstable();
    HasseDiagram {
        nodes: order
            .iter()
            .map(|(_, _, i)| space.concepts[*i].clone())
            .collect(),
        edges,
    }
}

impl HasseDiagram {
    /// Graphviz rendering with lesser concepts drawn lower.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, c) in self.nodes.iter().enumerate() {
            out.push_str(&format!(
                "  n{i} [label=\"{}\"];\n",
                escape(&wire::concept_label(c))
            ));
        }
        let mut rank_start = 0;
        while rank_start < self.nodes.len() {
            let rank = self.nodes[rank_start].len();
            let rank_end = (rank_start..self.nodes.len())
                .find(|&k| self.nodes[k].len() != rank)
                .unwrap_or(self.nodes.len());
            let names: Vec<String> = (rank_start..rank_end).map(|k| format!("n{k};")).collect();
            out.push_str(&format!("  {{ rank=same; {} }}\n", names.join(" ")));
            rank_start = rank_end;
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn hasse_export(space: &FiniteSpace) -> String {
    hasse(space).to_dot()
}
