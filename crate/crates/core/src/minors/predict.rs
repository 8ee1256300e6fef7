//! Shape prediction for measured resource states and its cross-check.
//!
//! Walking along the users of a resource, consecutive users are separated
//! either by a fixed edge or by one server photon. Measuring that photon
//! turns the separation into a [`Link`]: `Y` joins the two users by an
//! edge, `X` merges them into one redundantly encoded group, `Z` cuts.
//! Each group becomes a hub carrying its other members as leaves, and hubs
//! are joined along the surviving edges.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{apply_word, build_circulant, canonical_tour, circle_graph, leaf_expansion, MinorError, Result, TransitionWord};
use crate::exec;
use crate::graph::{classify_graph, locally_equivalent, Graph, MeasurementBasis, ShapeClass, Vertex};

/// Largest resource size `n` accepted.
pub const MAX_RESOURCE: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resource {
    /// Users and server photons alternate.
    Zigzag,
    /// A zigzag with one extra user leaf on every zigzag user.
    Honeycomb,
    /// A path in which the server owns every third photon.
    PathEveryThird,
}

impl FromStr for Resource {
    type Err = MinorError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "zigzag" => Ok(Self::Zigzag),
            "honeycomb" => Ok(Self::Honeycomb),
            "path-every-third" | "every-third" => Ok(Self::PathEveryThird),
            _ => Err(MinorError::Invalid(format!("unknown resource {s:?}"))),
        }
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zigzag => "zigzag",
            Self::Honeycomb => "honeycomb",
            Self::PathEveryThird => "path-every-third",
        })
    }
}

/// Relation between two consecutive users after measurement.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Edge,
    Merge,
    Cut,
}

impl From<MeasurementBasis> for Link {
    fn from(b: MeasurementBasis) -> Self {
        match b {
            MeasurementBasis::X => Link::Merge,
            MeasurementBasis::Y => Link::Edge,
            MeasurementBasis::Z => Link::Cut,
        }
    }
}

/// A resource graph with its roles.
///
/// The ring `0 – 1 – … – (n−1)` is the closed form; the server photons are
/// the multiples of the period (2 for the zigzag, 3 for the every-third
/// path). The open form drops vertex 0. Honeycomb leaves are labelled
/// `n, n+1, …` in user order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceGraph {
    pub resource: Resource,
    pub n: usize,
    pub closed: bool,
    pub graph: Graph,
    /// Measured photons in word order.
    pub servers: Vec<Vertex>,
    /// Users along the ring, ascending.
    pub users: Vec<Vertex>,
    pub leaves: BTreeMap<Vertex, Vertex>,
}

impl Resource {
    pub fn period(self) -> usize {
        match self {
            Self::Zigzag | Self::Honeycomb => 2,
            Self::PathEveryThird => 3,
        }
    }

    pub fn check_size(self, n: usize) -> Result<()> {
        if n > MAX_RESOURCE {
            return Err(MinorError::TooLarge { n, max: MAX_RESOURCE });
        }
        if n < 6 {
            return Err(MinorError::TooSmall { n, min: 6 });
        }
        if !n.is_multiple_of(self.period()) {
            return Err(MinorError::Invalid(format!("{self}: n = {n} is not a multiple of {}", self.period())));
        }
        Ok(())
    }

    pub fn build(self, n: usize, closed: bool) -> Result<ResourceGraph> {
        self.check_size(n)?;
        let n32 = n as Vertex;
        let p = self.period() as Vertex;
        let ring: Vec<Vertex> = (0..n32).collect();
        let mut graph = Graph::cycle(&ring);
        let mut servers: Vec<Vertex> = ring.iter().copied().filter(|v| v % p == 0).collect();
        let users: Vec<Vertex> = ring.iter().copied().filter(|v| v % p != 0).collect();
        if !closed {
            graph.remove_vertex(0)?;
            servers.remove(0);
        }
        let mut leaves = BTreeMap::new();
        if self == Self::Honeycomb {
            for (j, &u) in users.iter().enumerate() {
                let l = n32 + j as Vertex;
                graph.add_vertex(l)?;
                graph.add_edge(u, l)?;
                leaves.insert(u, l);
            }
        }
        Ok(ResourceGraph {
            resource: self,
            n,
            closed,
            graph,
            servers,
            users,
            leaves,
        })
    }
}

impl ResourceGraph {
    /// Link after each user, in user order.
    pub fn links(&self, word: &TransitionWord) -> Result<Vec<Link>> {
        if word.len() != self.servers.len() {
            return Err(MinorError::WordLength {
                expected: self.servers.len(),
                actual: word.len(),
            });
        }
        let letter: BTreeMap<Vertex, Link> = self.servers.iter().copied().zip(word.letters().map(Link::from)).collect();
        let n = self.n as Vertex;
        let p = self.resource.period() as Vertex;
        Ok(self
            .users
            .iter()
            .map(|&u| {
                let next = (u + 1) % n;
                if !next.is_multiple_of(p) {
                    Link::Edge
                } else {
                    letter.get(&next).copied().unwrap_or(Link::Cut)
                }
            })
            .collect())
    }

    /// Direct measurement of the server photons, in word order.
    pub fn measure(&self, word: &TransitionWord) -> Result<Graph> {
        self.links(word)?;
        let mut g = self.graph.clone();
        for (&s, b) in self.servers.iter().zip(word.letters()) {
            g.measure_pauli_mut(s, b)?;
        }
        Ok(g)
    }

    /// The same measurement carried out on the circulant multigraph:
    /// leaf expansions for honeycomb leaves, a `Z` fragment for the
    /// photon dropped by the open form, then the word. `None` when `n` has
    /// no canonical tour.
    pub fn transition_minor(&self, word: &TransitionWord) -> Result<Option<Graph>> {
        self.links(word)?;
        let Ok(mut tour) = canonical_tour(self.n) else {
            return Ok(None);
        };
        debug_assert!(tour.is_tour_of(&build_circulant(self.n)?));
        for (&u, &l) in &self.leaves {
            tour = leaf_expansion(&tour, u, l)?.1;
        }
        let mut measured = Vec::new();
        let mut letters = Vec::new();
        if !self.closed {
            measured.push(0);
            letters.push(MeasurementBasis::Z);
        }
        measured.extend(&self.servers);
        letters.extend(word.letters());
        let f = apply_word(&tour, &measured, &TransitionWord::new(letters))?;
        circle_graph(&f).map(Some)
    }
}

/// Caterpillar predicted for `word` on `r`.
pub fn predict_graph(r: &ResourceGraph, word: &TransitionWord) -> Result<Graph> {
    let links = r.links(word)?;
    let k = r.users.len();
    let mut g = Graph::empty(r.users.iter().copied());
    let mut hub_of: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    // Walk from just after a cut if there is one, else after any edge, so
    // that no group wraps around.
    let after = |l: Link| (0..k).find(|&i| links[i] == l).map(|i| (i + 1) % k);
    let start = after(Link::Cut).or_else(|| after(Link::Edge)).unwrap_or(0);
    let mut hubs = Vec::new();
    for step in 0..k {
        let i = (start + step) % k;
        let u = r.users[i];
        let before = links[(i + k - 1) % k];
        if step > 0 && before == Link::Merge {
            let hub = *hubs.last().unwrap();
            g.add_edge(hub, u)?;
            hub_of.insert(u, hub);
            continue;
        }
        if step > 0 && before == Link::Edge {
            g.toggle_edge(*hubs.last().unwrap(), u)?;
        }
        hub_of.insert(u, u);
        hubs.push(u);
    }
    let last = links[(start + k - 1) % k];
    if r.closed && last == Link::Edge && hubs.len() > 1 {
        g.toggle_edge(*hubs.last().unwrap(), hubs[0])?;
    }
    for (u, &l) in &r.leaves {
        g.add_vertex(l)?;
        g.add_edge(hub_of[u], l)?;
    }
    Ok(g)
}

/// Class of the zigzag state left by `word`: a ring with `|word|` server
/// photons when `close`, otherwise an open zigzag with `|word| + 1` users.
pub fn predict_class(word: &TransitionWord, close: bool) -> Result<ShapeClass> {
    let servers = word.len();
    let n = 2 * if close { servers } else { servers + 1 };
    let r = Resource::Zigzag.build(n, close)?;
    Ok(classify_graph(&predict_graph(&r, word)?))
}

/// Prediction against direct measurement, and against the transition
/// minor when available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossReport {
    pub resource: Resource,
    pub n: usize,
    pub closed: bool,
    pub word: TransitionWord,
    pub predicted: ShapeClass,
    pub predicted_graph: Graph,
    pub simulated_graph: Graph,
    /// Prediction locally equivalent to the measured graph.
    pub equivalent: bool,
    /// Transition-minor circle graph locally equivalent to the measured
    /// graph.
    pub transition_minor: Option<bool>,
}

pub fn crosscheck(resource: Resource, n: usize, closed: bool, word: &TransitionWord) -> Result<CrossReport> {
    let r = resource.build(n, closed)?;
    let simulated = r.measure(word)?;
    let predicted = predict_graph(&r, word)?;
    let equivalent = locally_equivalent(&predicted, &simulated)?;
    let transition_minor = match r.transition_minor(word)? {
        Some(tm) => Some(locally_equivalent(&tm, &simulated)?),
        None => None,
    };
    Ok(CrossReport {
        resource,
        n,
        closed,
        word: word.clone(),
        predicted: classify_graph(&predicted),
        predicted_graph: predicted,
        simulated_graph: simulated,
        equivalent,
        transition_minor,
    })
}

/// [`crosscheck`] for every word.
pub fn sweep(resource: Resource, n: usize, closed: bool) -> Result<Vec<CrossReport>> {
    let r = resource.build(n, closed)?;
    let words: Vec<TransitionWord> = TransitionWord::all(r.servers.len()).collect();
    exec::map_slice(&words, |w| crosscheck(resource, n, closed, w)).into_iter().collect()
}
