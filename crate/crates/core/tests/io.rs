mod common;

use rgbp::io::*;
use rgbp::preprocess::reduce;
use rgbp::reductions::{self, corpus, Construction};
use rgbp::solver::{solve_with, SolverConfig};

#[test]
fn random_round_trip() {
    let mut rng = common::rng(31);
    for _ in 0..1000 {
        let inst = common::random_instance(&mut rng);
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst.canonical().0);
        assert_eq!(serialize_instance(&back), text);
    }
}

#[test]
fn omitted_costs_mean_unit_costs() {
    let inst = parse_instance("rgbp 1\nvertices 3\nedge 0 1\nedge 1 2\nedge 0 2\nhabitat 0 1 2\nbudget 3\n").unwrap();
    assert!(inst.is_unit());
    assert_eq!(inst.mode(), rgbp::Mode::VertexTwoConnected);
}

#[test]
fn forced_lines_match_forced_edges() {
    let text = "rgbp 1\nmode edge\nvertices 3\nedge 0 1 2\nedge 1 2\nedge 0 2\nforced 2 1\nhabitat 0 1 2\nbudget 4\n";
    let inst = parse_instance(text).unwrap();
    let out = serialize_instance(&inst);
    assert_eq!(out.lines().filter(|l| l.starts_with("forced")).collect::<Vec<_>>(), vec!["forced 1 2"]);
}

#[test]
fn errors_name_the_line() {
    let cases = [
        ("vertices 3\n", 1),
        ("rgbp 1\nvertices 3\nedge 0 3\n", 3),
        ("rgbp 1\nvertices 3\nedge 0 1\nedge 0 1\n", 4),
        ("rgbp 1\nvertices 3\n\nforced 0 1\n", 4),
        ("rgbp 1\nvertices 3\nbudget 1\nbudget 2\n", 4),
        ("rgbp 1\nmode both\n", 2),
        ("rgbp 1\nvertices 3\nhabitat\n", 3),
    ];
    for (text, line) in cases {
        assert_eq!(parse_instance(text).unwrap_err().line, line, "{text:?}");
    }
}

#[test]
fn generated_documents_round_trip() {
    for (_, g) in corpus::graphs() {
        for c in [Construction::H4D7, Construction::H6D5, Construction::H22D3, Construction::H13D4] {
            let (inst, map) = reductions::generate(c, Some(&g), None, rgbp::Mode::EdgeTwoConnected).unwrap();
            let mut text = serialize_instance(&inst);
            text.push_str(&serialize_witness_map(&map));
            assert_eq!(parse_instance(&text).unwrap(), inst);
            assert_eq!(parse_witness_map(&text).unwrap(), map);
        }
    }
    let (inst, map) = reductions::gen_h5d6(&corpus::sat3());
    let text = serialize_instance(&inst) + &serialize_witness_map(&map);
    assert_eq!(parse_witness_map(&text).unwrap(), map);
    assert_eq!(parse_instance(&text).unwrap(), inst);
}

#[test]
fn source_formats_round_trip() {
    for (_, g) in corpus::graphs() {
        assert_eq!(parse_cubic_graph(&serialize_cubic_graph(&g)).unwrap().hcvc().unwrap(), g);
    }
    for (_, f) in corpus::formulas() {
        assert_eq!(parse_dimacs(&serialize_dimacs(&f)).unwrap(), f);
    }
    let no_cycle = "4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\np 3\n";
    assert!(parse_cubic_graph(no_cycle).unwrap().cycle.is_none());
}

#[test]
fn solution_and_trace_documents() {
    let mut rng = common::rng(32);
    for _ in 0..100 {
        let inst = common::random_instance(&mut rng);
        let report = solve_with(&inst, &SolverConfig::default()).unwrap();
        let doc = parse_solution(&serialize_solution(&inst, &report)).unwrap();
        assert_eq!(doc.cost, report.solution.cost);
        assert_eq!(doc.edge_set(&inst).unwrap(), report.solution.selected);
        if let Ok(red) = reduce(&inst) {
            let text = serialize_reduction(&red);
            assert_eq!(parse_trace(&text).unwrap(), red.trace);
            assert_eq!(parse_instance(&text).unwrap(), red.instance.canonical().0);
        }
    }
}
