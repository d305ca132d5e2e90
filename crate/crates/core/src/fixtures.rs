//! Built-in fixtures: small matroids, decompositions, perturbation chains
//! and weight models shared by the ledger, the CLI and the test suites.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connectivity::{Direction, PerturbationStep, TreeDecomposition};
use crate::harness::RngCoins;
use crate::matroid::{
    direct_sum, dual, r10, sample_sparse_paving, share, GraphicMatroid, LinearMatroid, MatroidRef, SparsePavingMatroid,
    UniformMatroid,
};
use crate::{ElementSet, Weighting};

/// A named matroid.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub matroid: MatroidRef,
}

fn fixture(name: &str, matroid: MatroidRef) -> Fixture {
    Fixture { name: name.to_string(), matroid }
}

pub fn uniform(r: usize, n: usize) -> MatroidRef {
    share(UniformMatroid::new(r, n).expect("valid uniform parameters"))
}

fn graphic(vertices: usize, edges: &[(usize, usize)]) -> MatroidRef {
    share(GraphicMatroid::new(vertices, edges.to_vec()).expect("valid graph"))
}

/// `M(K_4)` with edges `01, 02, 03, 12, 13, 23` as elements `0..6`.
pub fn k4() -> MatroidRef {
    share(GraphicMatroid::complete(4))
}

/// `M(K_4)` plus two more copies of edge `01` (elements 6 and 7), so that
/// element 0 has a parallel class of size 3.
pub fn k4_with_parallels() -> MatroidRef {
    graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1), (0, 1)])
}

/// Two triangles glued along edge `ab`: edges `ab, bc, ca, ab', bd, da`.
pub fn triangle_two_sum() -> MatroidRef {
    graphic(4, &[(0, 1), (1, 2), (2, 0), (0, 1), (1, 3), (3, 0)])
}

/// The Fano plane as the binary matroid of the 7 non-zero vectors of GF(2)^3.
pub fn fano() -> MatroidRef {
    let rows = vec![vec![1, 0, 0, 1, 1, 0, 1], vec![0, 1, 0, 1, 0, 1, 1], vec![0, 0, 1, 0, 1, 1, 1]];
    share(LinearMatroid::new(2, rows).expect("binary matrix"))
}

/// Rank-4 sparse paving matroid on 8 elements with circuit-hyperplanes
/// `{0,1,2,3}` and `{4,5,6,7}`.
pub fn paving_8_4() -> MatroidRef {
    let hyperplanes = [ElementSet::from_mask(0x0f), ElementSet::from_mask(0xf0)];
    share(SparsePavingMatroid::new(4, 8, hyperplanes).expect("valid hyperplanes"))
}

/// `U_{1,2} ⊕ U_{1,2}`.
pub fn double_u12() -> MatroidRef {
    direct_sum(uniform(1, 2), uniform(1, 2)).into()
}

/// A seeded random sparse paving matroid.
pub fn random_sparse_paving(n: usize, r: usize, h: usize, seed: u64) -> SparsePavingMatroid {
    let mut coins = RngCoins(ChaCha8Rng::seed_from_u64(seed));
    sample_sparse_paving(n, r, h, &mut coins, crate::matroid::DEFAULT_BASIS_ATTEMPTS).expect("2 <= r <= n").matroid
}

/// Fixtures with at most 8 elements (exhaustive evaluation range).
pub fn small_fixtures() -> Vec<Fixture> {
    vec![
        fixture("U(1,3)", uniform(1, 3)),
        fixture("U(2,3)", uniform(2, 3)),
        fixture("U(2,4)", uniform(2, 4)),
        fixture("U(3,6)", uniform(3, 6)),
        fixture("U(1,2)+U(1,2)", double_u12()),
        fixture("M(K4)", k4()),
        fixture("M*(K4)", dual(k4()).into()),
        fixture("triangle-2-sum", triangle_two_sum()),
        fixture("Fano", fano()),
        fixture("M(K4)+parallels", k4_with_parallels()),
        fixture("paving(8,4)", paving_8_4()),
    ]
}

/// Fixtures with 9 to 100 elements (Monte Carlo range).
pub fn medium_fixtures() -> Vec<Fixture> {
    vec![
        fixture("R10", share(r10())),
        fixture("M(K5)", share(GraphicMatroid::complete(5))),
        fixture("M*(K5)", dual(share(GraphicMatroid::complete(5))).into()),
        fixture("U(4,12)", uniform(4, 12)),
        fixture("M(K6)", share(GraphicMatroid::complete(6))),
        fixture("sparse-paving(12,6)", share(random_sparse_paving(12, 6, 12, 7))),
        fixture("U(20,40)", uniform(20, 40)),
        fixture("sparse-paving(40,20)", share(random_sparse_paving(40, 20, 40, 11))),
    ]
}

pub fn all_fixtures() -> Vec<Fixture> {
    let mut out = small_fixtures();
    out.extend(medium_fixtures());
    out
}

/// A matroid with a tree-decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionFixture {
    pub name: String,
    pub matroid: MatroidRef,
    pub decomposition: TreeDecomposition,
}

fn parts(masks: &[u64]) -> Vec<ElementSet> {
    masks.iter().map(|&m| ElementSet::from_mask(m)).collect()
}

/// `U_{1,2} ⊕ U_{1,2}` split into its summands (thickness 0).
pub fn direct_sum_decomposition() -> DecompositionFixture {
    DecompositionFixture {
        name: "U(1,2)+U(1,2)".to_string(),
        matroid: double_u12(),
        decomposition: TreeDecomposition::new(4, parts(&[0b0011, 0b1100]), vec![(0, 1)]).expect("tree"),
    }
}

/// `M(K_4)` split into the star at vertex 0 (vertex 0) and the opposite
/// triangle (vertex 1); thickness 2.
pub fn k4_star_triangle() -> DecompositionFixture {
    DecompositionFixture {
        name: "M(K4) star|triangle".to_string(),
        matroid: k4(),
        decomposition: TreeDecomposition::new(6, parts(&[0b000111, 0b111000]), vec![(0, 1)]).expect("tree"),
    }
}

/// The triangle 2-sum split into `{ab', bd, da}` and `{ab, bc, ca}`;
/// thickness 1, and `ab'` lies in the closure of the other side.
pub fn triangle_two_sum_decomposition() -> DecompositionFixture {
    DecompositionFixture {
        name: "triangle-2-sum".to_string(),
        matroid: triangle_two_sum(),
        decomposition: TreeDecomposition::new(6, parts(&[0b111000, 0b000111]), vec![(0, 1)]).expect("tree"),
    }
}

/// A path of three vertices whose middle part is empty; not full.
pub fn non_full_path() -> DecompositionFixture {
    DecompositionFixture {
        name: "U(1,2) path".to_string(),
        matroid: uniform(1, 2),
        decomposition: TreeDecomposition::new(2, parts(&[0b01, 0b00, 0b10]), vec![(0, 1), (1, 2)]).expect("tree"),
    }
}

pub fn full_decompositions() -> Vec<DecompositionFixture> {
    vec![direct_sum_decomposition(), k4_star_triangle(), triangle_two_sum_decomposition()]
}

/// A start matroid and a chain of verified-shape steps.
#[derive(Debug, Clone)]
pub struct PerturbationFixture {
    pub name: String,
    pub start: MatroidRef,
    pub steps: Vec<PerturbationStep>,
}

/// `K_4 \ 23` over GF(101) (signed incidence rows for vertices 1..3) plus a
/// sixth column `(1, 2, 5)`.
fn k4_minus_edge_extension() -> MatroidRef {
    let p = 101;
    let rows = vec![vec![-1, 0, 0, 1, 1, 1], vec![0, -1, 0, -1, 0, 2], vec![0, 0, -1, 0, -1, 5]];
    share(LinearMatroid::new(p, rows).expect("valid matrix"))
}

/// Lift `M(K_4) / 23` to `M(K_4) \ 23`, then project through a new element
/// in general position: two steps on 5 elements.
pub fn lift_then_project() -> PerturbationFixture {
    let lift = PerturbationStep::new(k4(), 5, Direction::Lift).expect("non-loop");
    let project = PerturbationStep::new(k4_minus_edge_extension(), 5, Direction::Projection).expect("non-loop");
    PerturbationFixture { name: "K4 lift+project".to_string(), start: lift.source(), steps: vec![lift, project] }
}

/// Weight models used by the ledger and the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightModel {
    /// I.i.d. uniform on `(0, 1]`.
    Uniform,
    /// The last element weighs 1, every other element `0.01`.
    Heavy,
}

impl WeightModel {
    pub fn name(self) -> &'static str {
        match self {
            WeightModel::Uniform => "uniform",
            WeightModel::Heavy => "heavy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(WeightModel::Uniform),
            "heavy" => Some(WeightModel::Heavy),
            _ => None,
        }
    }

    pub fn sample(self, n: usize, seed: u64) -> Weighting {
        match self {
            WeightModel::Uniform => uniform_weights(n, seed),
            WeightModel::Heavy => {
                let mut w = vec![0.01; n];
                if let Some(last) = w.last_mut() {
                    *last = 1.0;
                }
                Weighting::new(w).expect("finite weights")
            }
        }
    }
}

/// `n` i.i.d. uniform `(0, 1]` weights from `seed`.
pub fn uniform_weights(n: usize, seed: u64) -> Weighting {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Weighting::new((0..n).map(|_| 1.0 - rng.gen::<f64>()).collect()).expect("finite weights")
}
