use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fixtures;
use crate::matroid::{dual, share, UniformMatroid};

fn small() -> Vec<MatroidRef> {
    fixtures::small_fixtures().into_iter().map(|f| f.matroid).collect()
}

fn subsets(n: usize) -> impl Iterator<Item = ElementSet> {
    (0u64..(1 << n)).map(ElementSet::from_mask)
}

#[test]
fn lambda_is_symmetric_and_dual_invariant() {
    for m in small() {
        let n = m.ground_size();
        let d = dual(m.clone());
        for x in subsets(n) {
            let l = lambda(m.as_ref(), &x).unwrap();
            assert_eq!(l, lambda(m.as_ref(), &x.complement(n)).unwrap());
            assert_eq!(l, lambda(&d, &x).unwrap());
        }
    }
}

#[test]
fn lambda_is_submodular_on_k4_and_fano() {
    for m in [fixtures::k4(), fixtures::fano()] {
        let n = m.ground_size();
        let values: Vec<usize> = subsets(n).map(|x| lambda(m.as_ref(), &x).unwrap()).collect();
        for a in 0..(1u64 << n) {
            for b in 0..(1u64 << n) {
                let lhs = values[a as usize] + values[b as usize];
                let rhs = values[(a | b) as usize] + values[(a & b) as usize];
                assert!(lhs >= rhs);
            }
        }
    }
}

#[test]
fn local_connectivity_rejects_overlap() {
    let m = fixtures::k4();
    assert!(local_connectivity(m.as_ref(), &ElementSet::from_mask(0b11), &ElementSet::from_mask(0b10)).is_err());
    assert_eq!(
        local_connectivity(m.as_ref(), &ElementSet::from_mask(0b000111), &ElementSet::from_mask(0b111000)).unwrap(),
        2
    );
}

#[test]
fn decomposition_validation() {
    let p = |m: u64| ElementSet::from_mask(m);
    assert!(TreeDecomposition::new(4, vec![p(0b11), p(0b1100)], vec![(0, 1)]).is_ok());
    assert!(TreeDecomposition::new(4, vec![p(0b11), p(0b1110)], vec![(0, 1)]).is_err());
    assert!(TreeDecomposition::new(4, vec![p(0b11), p(0b0100)], vec![(0, 1)]).is_err());
    assert!(TreeDecomposition::new(4, vec![p(0b1), p(0b10), p(0b1100)], vec![(0, 1), (1, 0)]).is_err());
    assert!(TreeDecomposition::new(4, vec![p(0b11), p(0b1100)], vec![]).is_err());
    assert!(TreeDecomposition::new(4, vec![p(0b11), p(0b1100)], vec![(0, 2)]).is_err());
    assert!(TreeDecomposition::new(0, vec![], vec![]).is_err());
}

#[test]
fn fixture_thickness_and_fullness() {
    let k4 = fixtures::k4_star_triangle();
    assert_eq!(thickness(k4.matroid.as_ref(), &k4.decomposition).unwrap(), 2);
    assert!(is_full(k4.matroid.as_ref(), &k4.decomposition).unwrap());

    let two_sum = fixtures::triangle_two_sum_decomposition();
    assert_eq!(thickness(two_sum.matroid.as_ref(), &two_sum.decomposition).unwrap(), 1);
    assert!(is_full(two_sum.matroid.as_ref(), &two_sum.decomposition).unwrap());

    let sum = fixtures::direct_sum_decomposition();
    assert_eq!(thickness(sum.matroid.as_ref(), &sum.decomposition).unwrap(), 0);

    let path = fixtures::non_full_path();
    assert_eq!(thickness(path.matroid.as_ref(), &path.decomposition).unwrap(), 1);
    assert!(!is_full(path.matroid.as_ref(), &path.decomposition).unwrap());

    let single = TreeDecomposition::new(6, vec![ElementSet::full(6)], vec![]).unwrap();
    assert_eq!(thickness(k4.matroid.as_ref(), &single).unwrap(), 0);
    assert!(thickness(&UniformMatroid::new(1, 5).unwrap(), &single).is_err());
}

#[test]
fn normalization_moves_the_parallel_edge() {
    let fx = fixtures::triangle_two_sum_decomposition();
    let m = fx.matroid.as_ref();
    let norm = normalize_leaf(m, &fx.decomposition, 0).unwrap();
    assert_eq!(norm.neighbor, 1);
    assert_eq!(norm.moved, ElementSet::singleton(3));
    assert_eq!(norm.decomposition.part(0), &ElementSet::from_mask(0b110000));
    assert_eq!((norm.lambda_before, norm.lambda_after), (1, 1));
    let after = &norm.decomposition;
    assert_eq!(local_connectivity(m, after.part(0), after.part(1)).unwrap(), norm.lambda_after);
    assert!(after.part(0).is_disjoint(&closure(m, after.part(1)).unwrap()));
    assert!(normalize_leaf(m, &fx.decomposition, 2).is_err());
}

#[test]
fn without_leaf_relabels_parts() {
    let fx = fixtures::k4_star_triangle();
    let rest = delete(fx.matroid.clone(), fx.decomposition.part(0)).unwrap();
    let td = fx.decomposition.without_leaf(0, |e| rest.local_index(e).unwrap(), rest.ground_size()).unwrap();
    assert_eq!(td.vertex_count(), 1);
    assert_eq!(td.labels(), &[1]);
    assert_eq!(td.part(0), &ElementSet::full(3));
}

#[test]
fn lambda_witness_invariants_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in [fixtures::k4(), fixtures::uniform(2, 4), fixtures::triangle_two_sum(), fixtures::double_u12()] {
        for x in subsets(m.ground_size()) {
            let w = lemma_lambda_witness(m.clone(), &x, &mut rng).unwrap();
            w.verify(m.clone()).unwrap();
            assert_eq!(w.projection_count(), lambda(m.as_ref(), &x).unwrap());
        }
    }
}

#[test]
fn projection_chain_links_start_to_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = fixtures::k4();
    let w = lemma_lambda_witness(m.clone(), &ElementSet::from_mask(0b000111), &mut rng).unwrap();
    let chain = w.projection_chain();
    assert_eq!(chain.len(), 2);
    let mut current = w.start_matroid();
    for step in &chain {
        assert_eq!(step.direction, Direction::Projection);
        assert!(verify_perturbation_step(step, current.as_ref(), step.target().as_ref()).unwrap());
        current = step.target();
    }
    assert!(rank_functions_equal(current.as_ref(), w.end_matroid().as_ref()).unwrap());
    // Contracting the triangle turns the star into a parallel class of size 3.
    assert_eq!(current.full_rank(), 1);
    assert!(crate::matroid::loops(current.as_ref()).is_empty());
}

#[test]
fn perturbation_steps() {
    let k4 = fixtures::k4();
    let graph_loop = share(crate::matroid::GraphicMatroid::new(2, vec![(0, 0), (0, 1)]).unwrap());
    assert!(PerturbationStep::new(graph_loop, 0, Direction::Lift).is_err());
    assert!(PerturbationStep::new(k4.clone(), 6, Direction::Lift).is_err());

    let lift = PerturbationStep::new(k4.clone(), 0, Direction::Lift).unwrap();
    let (from, to) = (lift.contraction(), lift.deletion());
    assert!(verify_perturbation_step(&lift, &from, &to).unwrap());
    assert!(!verify_perturbation_step(&lift, &to, &from).unwrap());
    assert!(verify_perturbation_step(&lift, k4.as_ref(), &to).is_err());

    let chain = fixtures::lift_then_project();
    let mut current = chain.start.clone();
    for step in &chain.steps {
        assert!(verify_perturbation_step(step, current.as_ref(), step.target().as_ref()).unwrap());
        current = step.target();
    }
    assert_eq!(current.full_rank(), 2);
}
