use std::collections::BTreeSet;

use rgbp::model::instance_stats;
use rgbp::preprocess::reduce;
use rgbp::reductions::{self, corpus, Construction, SourceWitness};
use rgbp::solver::{solve, verify};
use rgbp::Instance;

fn cases() -> Vec<(String, Instance, rgbp::reductions::WitnessMap, Option<SourceWitness>, bool)> {
    let mut out = Vec::new();
    for (name, g) in corpus::graphs() {
        let cover = reductions::min_vertex_cover(g.graph()).unwrap();
        for c in Construction::ALL.into_iter().filter(|&c| c != Construction::H5D6) {
            for &mode in c.modes() {
                let (inst, map) = reductions::generate(c, Some(&g), None, mode).unwrap();
                out.push((format!("{c}/{name}/{mode}"), inst, map, Some(SourceWitness::Cover(cover.clone())), true));
            }
        }
    }
    for (name, f) in corpus::formulas() {
        let (inst, map) = reductions::gen_h5d6(&f);
        let alpha = reductions::oracle_sat22(&f).unwrap();
        let yes = alpha.is_some();
        out.push((format!("h5d6/{name}"), inst, map, alpha.map(SourceWitness::Assignment), yes));
    }
    out
}

#[test]
fn forward_witnesses_verify() {
    for (name, inst, map, w, _) in cases() {
        let Some(w) = w else { continue };
        let f = reductions::translate_witness(&map, &w).unwrap();
        let v = verify(&inst, &f);
        assert!(v.ok, "{name}: {:?}", v.diagnostic);
    }
}

#[test]
fn reduce_leaves_choice_edges() {
    for (name, inst, map, _, _) in cases() {
        let red = reduce(&inst).unwrap();
        let free: BTreeSet<_> = red
            .instance
            .graph()
            .edge_ids()
            .filter(|&e| !red.instance.is_forced(e))
            .map(|e| red.edge_origin[e.0])
            .collect();
        assert_eq!(free, map.choice_edges(), "{name}");
        let s = instance_stats(&inst);
        eprintln!("{name}: eta={} delta={} free={}", s.eta, s.delta, free.len());
    }
}

#[test]
fn small_decisions_match_oracles() {
    for (name, inst, _, _, yes) in cases() {
        if !(name.contains("/k4/") || name.starts_with("h5d6/sat3") || name.starts_with("h5d6/unsat3")) {
            continue;
        }
        let sol = solve(&inst).unwrap();
        assert_eq!(sol.cost <= inst.budget(), yes, "{name}");
    }
}

#[test]
fn witnesses_read_back() {
    let f = corpus::sat6();
    let (inst, map) = reductions::gen_h5d6(&f);
    let sol = solve(&inst).unwrap();
    let Ok(SourceWitness::Assignment(alpha)) = reductions::extract_witness(&map, &sol.selected) else { panic!() };
    assert!(f.satisfied_by(&alpha));

    let g = corpus::prism();
    for c in [Construction::H22D3, Construction::H13D4] {
        let (inst, map) = reductions::generate(c, Some(&g), None, rgbp::Mode::VertexTwoConnected).unwrap();
        let sol = solve(&inst).unwrap();
        let Ok(SourceWitness::Cover(cover)) = reductions::extract_witness(&map, &sol.selected) else { panic!() };
        assert!(cover.len() <= g.p());
        assert!(g.graph().edges().all(|(_, (a, b))| cover.contains(&a) || cover.contains(&b)));
    }
}

#[test]
fn generators_are_deterministic() {
    let g = corpus::cube();
    for c in [Construction::H4D7, Construction::H6D5, Construction::H22D3, Construction::H13D4] {
        let a = reductions::generate(c, Some(&g), None, rgbp::Mode::VertexTwoConnected).unwrap();
        let b = reductions::generate(c, Some(&g), None, rgbp::Mode::VertexTwoConnected).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn bad_witnesses_are_rejected() {
    let g = corpus::k4();
    let (_, map) = reductions::gen_h4d7(&g);
    assert!(reductions::translate_witness(&map, &SourceWitness::Cover(vec![0])).is_err());
    assert!(reductions::translate_witness(&map, &SourceWitness::Assignment(vec![true])).is_err());
    let (_, map) = reductions::gen_h5d6(&corpus::unsat3());
    assert!(reductions::translate_witness(&map, &SourceWitness::Assignment(vec![true; 3])).is_err());
    assert!(rgbp::reductions::generate(Construction::H5D6, None, Some(&corpus::sat3()), rgbp::Mode::EdgeTwoConnected).is_err());
}
