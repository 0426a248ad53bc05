//! Stream generators: the lookahead hard instance, seeded random streams and
//! a fixed suite of stress shapes.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{concat, Label, StreamSlice};
use crate::oracle::{exact_mwm, OracleLimits};
use crate::ps::{self, degree_cap, PsError, PsParams};
use crate::streamfile::StreamFile;
use crate::weight::Weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error(transparent)]
    Ps(#[from] PsError),
    #[error(
        "hard instance constraint ({id}) failed: {name}: measured {measured}, expected {expected}"
    )]
    Constraint {
        id: char,
        name: &'static str,
        measured: String,
        expected: String,
    },
    #[error("stream has no events labelled {0:?}")]
    MissingSlice(Label),
}

/// Aggregates the hard instance must reproduce, all as functions of `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardExpected {
    /// Heaviest monotonic matching on `AB` and on `B`: `2 + 2 eps`.
    pub monotonic_ab: Weight,
    pub monotonic_b: Weight,
    /// `W'` on `AB` (`2 + 2 eps`) and on `B` (`1 + 2 eps`).
    pub w_prime_ab: Weight,
    pub w_prime_b: Weight,
    /// Greedy matching on `BC`: `2 + 4 eps`.
    pub greedy_bc: Weight,
    /// Optimum on `ABC`: `7 + 3 eps`.
    pub optimum_abc: Weight,
}

impl HardExpected {
    pub fn for_epsilon(eps: &Weight) -> Self {
        let k = |a: u64, b: u64| Weight::integer(a) + Weight::integer(b) * eps.clone();
        HardExpected {
            monotonic_ab: k(2, 2),
            monotonic_b: k(2, 2),
            w_prime_ab: k(2, 2),
            w_prime_b: k(1, 2),
            greedy_bc: k(2, 4),
            optimum_abc: k(7, 3),
        }
    }

    /// `(7 + 3 eps) / (2 + 4 eps)`.
    pub fn ratio(&self) -> Weight {
        self.optimum_abc.clone() / self.greedy_bc.clone()
    }
}

/// One measured constraint of the hard instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub id: char,
    pub name: &'static str,
    pub measured: String,
    pub expected: String,
    pub passed: bool,
}

impl fmt::Display for ConstraintCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] ({}) {}: measured {} expected {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardInstanceSpec {
    pub epsilon: Weight,
    pub n: usize,
    pub a: StreamSlice,
    pub b: StreamSlice,
    pub c: StreamSlice,
    pub expected: HardExpected,
}

/// Vertex names for the hard instance. Two paths `a-b-c-d`, then the
/// vertices touched by `B` and `C`.
mod v {
    pub const P1: [usize; 4] = [0, 1, 2, 3];
    pub const P2: [usize; 4] = [4, 5, 6, 7];
    pub const Q: usize = 8;
    pub const X: usize = 9;
    pub const Z: usize = 10;
    pub const S1: usize = 11;
    pub const S2: usize = 12;
    pub const T: usize = 13;
    pub const N: usize = 14;
}

/// Builds the three-part stream on which matching-weight smoothness holds
/// while the greedy output on `BC` falls short of the optimum on `ABC` by
/// `(7 + 3 eps) / (2 + 4 eps)`.
///
/// * `A`: two paths `a-b-c-d`; the middle edges (`1 + eps`) arrive first, the
///   unit outer edges second and are discarded.
/// * `B`: a unit edge `b-q`, then `b-x` and `q-c'` of weight `1 + eps`. On its
///   own each of the latter two meets the push threshold with equality.
/// * `C`: `x-z` (`1 + eps`), unit pendants `x-s`, `z-s'`, then `q-t` (`1 + 3 eps`).
///
/// The optimum takes every edge with a degree-one endpoint. The result is
/// verified against [`HardExpected`] before it is returned.
pub fn gen_hard_instance(epsilon: &Weight) -> Result<HardInstanceSpec, InstanceError> {
    let params = PsParams::new(epsilon.clone(), v::N)?;
    let one = Weight::integer(1);
    let thick = one.clone() + epsilon.clone();
    let heavy = one.clone() + Weight::integer(3) * epsilon.clone();
    let [a1, b1, c1, d1] = v::P1;
    let [a2, b2, c2, d2] = v::P2;

    let slice = |label, edges: Vec<(usize, usize, Weight)>| {
        StreamSlice::from_triples(label, edges).expect("hard instance edges are well formed")
    };
    let a = slice(
        Label::A,
        vec![
            (b1, c1, thick.clone()),
            (b2, c2, thick.clone()),
            (a1, b1, one.clone()),
            (c1, d1, one.clone()),
            (a2, b2, one.clone()),
            (c2, d2, one.clone()),
        ],
    );
    let b = slice(
        Label::B,
        vec![
            (b1, v::Q, one.clone()),
            (b1, v::X, thick.clone()),
            (v::Q, c2, thick.clone()),
        ],
    );
    let c = slice(
        Label::C,
        vec![
            (v::X, v::Z, thick),
            (v::X, v::S1, one.clone()),
            (v::Z, v::S2, one),
            (v::Q, v::T, heavy),
        ],
    );
    let spec = HardInstanceSpec {
        epsilon: epsilon.clone(),
        n: params.vertices(),
        a,
        b,
        c,
        expected: HardExpected::for_epsilon(epsilon),
    };
    if let Some(failed) = spec.verify()?.into_iter().find(|c| !c.passed) {
        return Err(InstanceError::Constraint {
            id: failed.id,
            name: failed.name,
            measured: failed.measured,
            expected: failed.expected,
        });
    }
    Ok(spec)
}

impl HardInstanceSpec {
    /// Rebuilds a spec from an `A`/`B`/`C`-labelled stream.
    pub fn from_labelled(epsilon: &Weight, file: &StreamFile) -> Result<Self, InstanceError> {
        let part = |label| {
            let s = file.stream.sub_slice(label);
            if s.is_empty() {
                Err(InstanceError::MissingSlice(label))
            } else {
                Ok(s)
            }
        };
        Ok(HardInstanceSpec {
            epsilon: epsilon.clone(),
            n: file.n,
            a: part(Label::A)?,
            b: part(Label::B)?,
            c: part(Label::C)?,
            expected: HardExpected::for_epsilon(epsilon),
        })
    }

    pub fn abc(&self) -> StreamSlice {
        concat(&[self.a.clone(), self.b.clone(), self.c.clone()])
    }

    pub fn to_stream_file(&self) -> StreamFile {
        StreamFile::new(self.n, self.abc())
    }

    /// Measures every constraint. Errors only on invalid parameters.
    pub fn verify(&self) -> Result<Vec<ConstraintCheck>, InstanceError> {
        let params = PsParams::new(self.epsilon.clone(), self.n)?;
        let ex = &self.expected;
        let ab = concat(&[self.a.clone(), self.b.clone()]);
        let bc = concat(&[self.b.clone(), self.c.clone()]);
        let abc = self.abc();

        let (state_ab, mon_ab) = ps::run_monotonic(&params, &ab)?;
        let (state_b, mon_b) = ps::run_monotonic(&params, &self.b)?;
        let (state_bc, trace_bc) = ps::run_traced(&params, &bc)?;
        let greedy_bc = state_bc.extract_matching().total;
        // Optimum over every edge the BC run ever pushed, trimmed or not.
        let pushed_bc: Vec<_> = trace_bc
            .iter()
            .zip(&bc.events)
            .filter(|(r, _)| r.decision == ps::Decision::Pushed)
            .map(|(_, e)| e.clone())
            .collect();
        let unbounded = OracleLimits {
            max_edges: usize::MAX,
            max_vertices: usize::MAX,
        };
        let best_pushed_bc = exact_mwm(&pushed_bc, &unbounded).expect("unbounded").total;
        let optimum = exact_mwm(&abc.events, &unbounded).expect("unbounded").total;

        let (_, trace_ab) = ps::run_traced(&params, &ab)?;
        let b_pushed_in_ab = trace_ab[self.a.len()..]
            .iter()
            .filter(|r| r.decision == ps::Decision::Pushed)
            .count();

        let check = |id, name, measured: &Weight, expected: &Weight| ConstraintCheck {
            id,
            name,
            measured: measured.to_string(),
            expected: expected.to_string(),
            passed: measured == expected,
        };
        let (paths_ok, paths_desc) = two_disjoint_paths(&self.a);
        Ok(vec![
            check(
                'a',
                "monotonic matching on AB",
                &mon_ab.total,
                &ex.monotonic_ab,
            ),
            check(
                'a',
                "monotonic matching on B",
                &mon_b.total,
                &ex.monotonic_b,
            ),
            check('b', "W' on AB", state_ab.w_prime(), &ex.w_prime_ab),
            check('b', "W' on B", state_b.w_prime(), &ex.w_prime_b),
            check('c', "greedy matching on BC", &greedy_bc, &ex.greedy_bc),
            check(
                'c',
                "best matching among edges pushed on BC",
                &best_pushed_bc,
                &ex.greedy_bc,
            ),
            check('d', "optimum on ABC", &optimum, &ex.optimum_abc),
            ConstraintCheck {
                id: 'e',
                name: "B edges pushed during the AB run",
                measured: b_pushed_in_ab.to_string(),
                expected: "0".into(),
                passed: b_pushed_in_ab == 0,
            },
            ConstraintCheck {
                id: 'f',
                name: "A is two vertex-disjoint three-edge paths",
                measured: paths_desc,
                expected: "2 paths x 3 edges".into(),
                passed: paths_ok,
            },
        ])
    }
}

/// Whether `s` is exactly two vertex-disjoint paths of three edges each.
fn two_disjoint_paths(s: &StreamSlice) -> (bool, String) {
    let mut adj: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for e in &s.events {
        adj.entry(e.u.0).or_default().push(e.v.0);
        adj.entry(e.v.0).or_default().push(e.u.0);
    }
    let mut seen = HashSet::new();
    let mut components = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut stack = vec![start];
        let mut vertices = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    vertices.push(y);
                    stack.push(y);
                }
            }
        }
        let degrees: Vec<usize> = vertices.iter().map(|x| adj[x].len()).collect();
        let edges = degrees.iter().sum::<usize>() / 2;
        let is_path = edges + 1 == vertices.len() && degrees.iter().all(|&d| d <= 2);
        components.push((is_path, edges));
    }
    let ok = components.len() == 2 && components.iter().all(|&(p, e)| p && e == 3);
    let desc = components
        .iter()
        .map(|(p, e)| format!("{}({e})", if *p { "path" } else { "non-path" }))
        .collect::<Vec<_>>()
        .join(" + ");
    (
        ok,
        if desc.is_empty() {
            "empty".into()
        } else {
            desc
        },
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightDist {
    /// Multiples of `1/denom` in `[lo, hi]`.
    Uniform { lo: u64, hi: u64, denom: u64 },
    /// `2^j * (8 + r) / 8` with `j < buckets` and `r < 8`, both uniform.
    PowerLaw { buckets: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomStreamSpec {
    pub n: usize,
    pub m: usize,
    pub weights: WeightDist,
    pub seed: u64,
    /// Probability that an event repeats an earlier endpoint pair.
    pub duplicate_rate: f64,
}

impl RandomStreamSpec {
    pub fn uniform(n: usize, m: usize, seed: u64) -> Self {
        RandomStreamSpec {
            n,
            m,
            weights: WeightDist::Uniform {
                lo: 1,
                hi: 100,
                denom: 1,
            },
            seed,
            duplicate_rate: 0.0,
        }
    }
}

/// Deterministic given the spec. Events that are not deliberate repeats use
/// an endpoint pair not seen before whenever one is left.
pub fn gen_random(spec: &RandomStreamSpec) -> StreamSlice {
    assert!(spec.n >= 2, "need at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut all_pairs: Vec<(usize, usize)> = (0..spec.n)
        .flat_map(|u| (u + 1..spec.n).map(move |v| (u, v)))
        .collect();
    all_pairs.shuffle(&mut rng);
    let mut fresh = all_pairs.into_iter();
    let mut used: Vec<(usize, usize)> = Vec::new();

    let triples = (0..spec.m)
        .map(|_| {
            let repeat = !used.is_empty() && rng.gen_bool(spec.duplicate_rate.clamp(0.0, 1.0));
            let (u, v) = if repeat {
                used[rng.gen_range(0..used.len())]
            } else if let Some(p) = fresh.next() {
                p
            } else {
                let u = rng.gen_range(0..spec.n);
                let v = (u + rng.gen_range(1..spec.n)) % spec.n;
                (u.min(v), u.max(v))
            };
            used.push((u, v));
            let (u, v) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
            (u, v, draw_weight(&spec.weights, &mut rng))
        })
        .collect::<Vec<_>>();
    StreamSlice::from_triples(Label::Plain, triples).expect("generated edges are well formed")
}

fn draw_weight(dist: &WeightDist, rng: &mut impl Rng) -> Weight {
    match *dist {
        WeightDist::Uniform { lo, hi, denom } => {
            let denom = denom.max(1);
            let k = rng.gen_range(lo.max(1) * denom..=hi.max(lo.max(1)) * denom);
            Weight::ratio(k as i64, denom as i64)
        }
        WeightDist::PowerLaw { buckets } => {
            let j = rng.gen_range(0..buckets.max(1));
            let r = rng.gen_range(0..8u64);
            Weight::integer(1 << j) * Weight::ratio(8 + r as i64, 8)
        }
    }
}

/// A named, fixed stress stream.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedStream {
    pub name: &'static str,
    pub n: usize,
    pub stream: StreamSlice,
}

/// Deterministic stress streams for `eps`:
///
/// * `empty`: no events.
/// * `star-cap`: `5 * cap` edges at one center with weights `2^k`, each pushed.
/// * `geometric-path`: a 20-edge path with weights `(1 + eps)^k`.
/// * `heavy-prefix`: heavy edges followed by a long light tail.
/// * `parallel-repeats`: one edge repeated with identical weight.
/// * `alternating-scales`: a 6-cycle whose weights alternate between scales.
pub fn gen_adversarial_suite(epsilon: &Weight) -> Vec<NamedStream> {
    let step = Weight::integer(1) + epsilon.clone();
    let cap = degree_cap(epsilon);
    let build = |triples: Vec<(usize, usize, Weight)>| {
        StreamSlice::from_triples(Label::Plain, triples).expect("suite edges are well formed")
    };

    let star_edges = 5 * cap;
    let two = Weight::integer(2);
    let star = build(
        (0..star_edges)
            .map(|k| (0, k + 1, two.pow(k as u32)))
            .collect(),
    );
    let path = build((0..20).map(|k| (k, k + 1, step.pow(k as u32))).collect());

    let mut heavy = Vec::new();
    for k in 0..6 {
        heavy.push((k, (k + 1) % 8, Weight::integer(1000 + 10 * k as u64)));
    }
    for k in 0..18 {
        heavy.push((k % 8, (k + 3) % 8, Weight::integer(1 + (k as u64 % 3))));
    }

    let repeats = build(vec![(0, 1, Weight::integer(5)); 24]);
    let alternating = build(
        (0..24)
            .map(|k| {
                let w = if k % 2 == 0 {
                    Weight::integer(1)
                } else {
                    Weight::integer(64)
                };
                (k % 6, (k + 1) % 6, w)
            })
            .collect(),
    );

    vec![
        NamedStream {
            name: "empty",
            n: 2,
            stream: StreamSlice::default(),
        },
        NamedStream {
            name: "star-cap",
            n: star_edges + 1,
            stream: star,
        },
        NamedStream {
            name: "geometric-path",
            n: 21,
            stream: path,
        },
        NamedStream {
            name: "heavy-prefix",
            n: 8,
            stream: build(heavy),
        },
        NamedStream {
            name: "parallel-repeats",
            n: 2,
            stream: repeats,
        },
        NamedStream {
            name: "alternating-scales",
            n: 6,
            stream: alternating,
        },
    ]
}
