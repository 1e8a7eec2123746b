mod common;

use std::collections::BTreeSet;

use rgbp::habitat_graph::Shape;
use rgbp::solver::{
    branch_and_bound, dp_cycle, dp_path, enumerate_feasible, exhaustive_search, solve, solve_component, solve_with,
    verify, SolverConfig,
};
use rgbp::{EdgeId, Graph, Habitat, Instance, Mode};

#[test]
fn solve_matches_brute_force() {
    let mut rng = common::rng(21);
    for _ in 0..300 {
        let inst = common::random_instance(&mut rng);
        let want = common::brute_force(&inst);
        let sol = solve(&inst).unwrap();
        match want {
            None => assert!(sol.is_infeasible()),
            Some(c) => {
                assert_eq!(sol.cost, c);
                assert!(common::feasible(&inst, &sol.selected));
                assert_eq!(inst.cost_of(&sol.selected), c);
            }
        }
    }
}

#[test]
fn engines_agree_with_brute_force() {
    let mut rng = common::rng(22);
    for _ in 0..150 {
        let inst = common::random_instance(&mut rng);
        let want = common::brute_force(&inst);
        let ex = exhaustive_search(&inst).unwrap();
        let bb = branch_and_bound(&inst);
        for sol in [ex, bb] {
            assert_eq!(want, (!sol.is_infeasible()).then_some(sol.cost));
        }
        let sc = solve_component(&inst, Shape::Other).unwrap();
        assert_eq!(want, (!sc.is_infeasible()).then_some(sc.cost));
    }
}

#[test]
fn dp_matches_product_oracle() {
    let mut rng = common::rng(23);
    for i in 0..60 {
        let cyclic = i % 3 == 0;
        let len = if cyclic { 3 + i % 4 } else { 1 + i % 6 };
        let (inst, order) = common::chain_instance(&mut rng, len, cyclic);
        let want = common::product_oracle(&inst);
        let sol = if cyclic { dp_cycle(&inst, &order) } else { dp_path(&inst, &order) }.unwrap();
        assert_eq!(want, (!sol.is_infeasible()).then_some(sol.cost));
        if !sol.is_infeasible() {
            assert!(common::feasible(&inst, &sol.selected));
        }
    }
}

#[test]
fn dp_rejects_a_wrong_order() {
    let mut rng = common::rng(24);
    let (inst, _) = common::chain_instance(&mut rng, 4, false);
    assert!(dp_path(&inst, &[0, 2, 1, 3]).is_err());
}

#[test]
fn feasible_family_of_a_four_cycle() {
    // C4 plus one chord: the cycle alone and the full set pass
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
    let inst = Instance::unit(g, vec![Habitat::new(0..4).unwrap()], 5, Mode::VertexTwoConnected).unwrap();
    let fam = enumerate_feasible(&inst, 0).unwrap();
    let sets: BTreeSet<BTreeSet<EdgeId>> = (0..fam.len()).map(|i| fam.edge_set(i)).collect();
    assert_eq!(sets.len(), 2);
}

#[test]
fn verify_reports_first_problem() {
    let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let inst = Instance::new(g, vec![1, 1, 1], [EdgeId(0)], vec![Habitat::new(0..3).unwrap()], 3, Mode::VertexTwoConnected)
        .unwrap();
    let all: BTreeSet<EdgeId> = (0..3).map(EdgeId).collect();
    assert!(verify(&inst, &all).ok);
    let missing: BTreeSet<EdgeId> = [EdgeId(1), EdgeId(2)].into();
    assert!(verify(&inst, &missing).diagnostic.unwrap().contains("forced edge missing"));
    assert!(!verify(&inst.clone().with_budget(2), &all).ok);
    let unknown: BTreeSet<EdgeId> = [EdgeId(9)].into();
    assert!(!verify(&inst, &unknown).ok);
}

#[test]
fn no_habitats_is_a_yes_instance() {
    let inst = Instance::unit(Graph::new(3, [(0, 1)]).unwrap(), vec![], 0, Mode::VertexTwoConnected).unwrap();
    let report = solve_with(&inst, &SolverConfig::default()).unwrap();
    assert!(report.answer);
    assert_eq!(report.solution.cost, 0);
}

#[test]
fn sequential_and_parallel_agree() {
    let mut rng = common::rng(25);
    for _ in 0..100 {
        let inst = common::random_instance(&mut rng);
        let a = solve_with(&inst, &SolverConfig { parallel: true, ..SolverConfig::default() }).unwrap();
        let b = solve_with(&inst, &SolverConfig { parallel: false, ..SolverConfig::default() }).unwrap();
        assert_eq!(a.solution.selected, b.solution.selected);
        assert_eq!(a.answer, b.answer);
    }
}
