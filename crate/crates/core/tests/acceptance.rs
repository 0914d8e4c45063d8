//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use reebedit::category::{compose, pullback};
use reebedit::edit::{
    build_homotopy_zigzag, compose_couplings, coupling_bound, point_distance, product_coupling, zigzag_cost, Coupling,
    ZigzagDiagram,
};
use reebedit::generate::{cylinder_maps, generate, InstanceSpec};
use reebedit::metrics::{distortion, distortion_with, fd_upper_bound};
use reebedit::scalar::{self, int, ratio};
use reebedit::{
    compute_reeb, graph_isomorphic, interval_preimage_components, reeb_of_cells, reeb_of_graph, Map, ReebGraph,
};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn cylinder_reeb_graphs() -> Check {
    let start = Instant::now();
    for n in [8, 16, 32] {
        let inst = ok(generate(&InstanceSpec::Cylinder { n }), "generate")?;
        let (rf, _) = ok(compute_reeb(&inst.complex, &inst.functions[0]), "reeb f")?;
        let (rg, _) = ok(compute_reeb(&inst.complex, &inst.functions[1]), "reeb g")?;
        ensure(rf.betti_1() == 1, || format!("n={n}: betti_1 of R_f is {}", rf.betti_1()))?;
        ensure(*rf.min_value() == int(-1) && *rf.max_value() == int(1), || format!("n={n}: R_f range"))?;
        let path = rg.minimalize();
        ensure(path.node_count() == 2 && path.edge_count() == 1, || format!("n={n}: R_g is not a path"))?;
        ensure(*rg.min_value() == int(-1) && *rg.max_value() == int(1), || format!("n={n}: R_g ends"))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("n = 8, 16, 32 in {took:?}"))
}

fn cylinder_coupling() -> Check {
    for n in [8, 16, 32] {
        let inst = ok(generate(&InstanceSpec::Cylinder { n }), "generate")?;
        let maps = ok(cylinder_maps(&inst), "maps")?;
        let c = ok(Coupling::new(maps.p_f, maps.p_g), "coupling")?;
        let b = coupling_bound(&c);
        ensure(b == int(1), || format!("n={n}: bound {}", scalar::format(&b)))?;
    }
    Ok("bound = 1 for n = 8, 16, 32".into())
}

fn distortion_gap() -> Check {
    for n in [8, 16, 32] {
        let inst = ok(generate(&InstanceSpec::Cylinder { n }), "generate")?;
        let maps = ok(cylinder_maps(&inst), "maps")?;
        let nodes = ok(distortion(&maps.phi, &maps.psi, 0), "node distortion")?;
        ensure(nodes.distortion <= scalar::half(), || format!("n={n}: node pair with |d_f - d_g| > 1"))?;
        let d = ok(distortion_with(&maps.phi, &maps.psi, 1, true), "distortion")?;
        ensure(d.defect_phi == int(0) && d.defect_psi == int(0), || format!("n={n}: value defects"))?;
        ensure(d.tight, || format!("n={n}: sample not tight"))?;
        let bound = ok(fd_upper_bound(&[(maps.phi.clone(), maps.psi.clone())], 1), "fd bound")?;
        ensure(bound <= scalar::half() && d.bound() <= scalar::half(), || {
            format!("n={n}: fd bound {}", scalar::format(&bound))
        })?;
    }
    let circle = ok(generate(&InstanceSpec::Circle { n: 8 }), "circle")?;
    let cells = circle.complex.to_cells();
    let (rf, _) = ok(compute_reeb(&circle.complex, &circle.functions[0]), "circle reeb")?;
    for delta in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
        let lo = -delta.clone();
        let a = ok(interval_preimage_components(&cells, circle.functions[0].values(), &lo, &delta), "preimage")?;
        let b = ok(interval_preimage_components(rf.complex(), rf.values(), &lo, &delta), "preimage")?;
        ensure(a.len() == 2 && b.len() == 2, || format!("delta {}: {} and {}", delta, a.len(), b.len()))?;
    }
    Ok("fd bound <= 1/2 with zero defects; [-d, d] has 2 components".into())
}

fn point_graph_distance() -> Check {
    for seed in 0..50u64 {
        let inst = common::random_instance(seed, 3 + (seed % 10) as usize);
        let (rf, _) = ok(compute_reeb(&inst.complex, &inst.functions[0]), "reeb")?;
        let c = ratio(seed as i64 % 7 - 3, 1 + (seed % 3) as i64);
        let scan = rf.values().iter().map(|v| scalar::abs(&(v - &c))).max().unwrap();
        let point = Arc::new(ReebGraph::point(c.clone()));
        let prod = ok(product_coupling(&rf, &point), "product")?;
        let d = point_distance(&rf, &c);
        ensure(d == scan && coupling_bound(&prod) == d, || format!("seed {seed}"))?;
    }
    Ok("50 random graphs".into())
}

fn stability_suite() -> Check {
    let start = Instant::now();
    let mut stages = 0;
    for seed in 0..100u64 {
        let inst = common::random_instance(1000 + seed, 4 + (seed % 9) as usize);
        let (k, f, g) = (&inst.complex, &inst.functions[0], &inst.functions[1]);
        let h = ok(build_homotopy_zigzag(k, f, g), &format!("seed {seed}"))?;
        ok(h.zigzag.certify(), &format!("seed {seed}"))?;
        stages += h.zigzag.legs().len();
        let sup = f.sup_distance(g);
        ensure(h.cost.cost <= sup, || {
            format!("seed {seed}: cost {} > {}", scalar::format(&h.cost.cost), scalar::format(&sup))
        })?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("100 zigzags, {stages} stages, {took:?}"))
}

fn random_coupling(seed: u64) -> std::result::Result<Coupling, String> {
    let inst = common::random_instance(seed, 3 + (seed % 10) as usize);
    let (_, p_f) = ok(compute_reeb(&inst.complex, &inst.functions[0]), "reeb f")?;
    let (_, p_g) = ok(compute_reeb(&inst.complex, &inst.functions[1]), "reeb g")?;
    ok(Coupling::new(p_f, p_g), "coupling")
}

fn single_coupling_cost() -> Check {
    for seed in 0..50u64 {
        let c = random_coupling(2000 + seed)?;
        let cost = ok(zigzag_cost(&ZigzagDiagram::from_coupling(&c)), "cost")?;
        ensure(cost.cost == coupling_bound(&c), || format!("seed {seed}"))?;
    }
    Ok("50 couplings".into())
}

fn iso(a: &ReebGraph, b: &ReebGraph) -> bool {
    graph_isomorphic(&a.minimalize(), &b.minimalize()).is_some()
}

fn categorical_suite() -> Check {
    for seed in 0..50u64 {
        let inst = common::random_instance(3000 + seed, 3 + (seed % 10) as usize);
        let (k, f) = (&inst.complex, &inst.functions[0]);
        let (rf, p) = ok(compute_reeb(k, f), "reeb")?;
        // (a) composition
        let (_, q) = ok(reeb_of_graph(&rf), "graph reeb")?;
        let pq = ok(compose(&p, &q), "compose")?;
        ok(pq.verify_with(f.values()), &format!("seed {seed}: composite"))?;
        let pid = ok(compose(&p, &Map::identity(&rf)), "compose id")?;
        ok(pid.verify(), &format!("seed {seed}: composite with identity"))?;
        // (b) pullback
        for other in [p.clone(), Map::identity(&rf), pq.clone()] {
            let target = other.target().clone();
            let pb = ok(pullback(&p, &other), "pullback")?;
            ensure(pb.space.is_connected(), || format!("seed {seed}: total space disconnected"))?;
            let q2 = ok(pb.pull_right(&other), "projection")?;
            ok(q2.verify(), &format!("seed {seed}: pulled-back map"))?;
            ok(pb.pull_left(&p).and_then(|m| Ok(m.verify()?)), &format!("seed {seed}: left leg"))?;
            ensure(**q2.target() == *target, || "target changed".into())?;
            if **other.source() == **rf.complex() {
                ok(pb.right_projection(&rf).and_then(|m| Ok(m.verify()?)), &format!("seed {seed}: projection"))?;
            }
        }
        // (c) idempotence and lifting
        let (again, _) = ok(reeb_of_graph(&rf), "idempotence")?;
        ensure(iso(&again, &rf), || format!("seed {seed}: Reeb graph of R_f differs"))?;
        let pb = ok(pullback(&p, &p), "self pullback")?;
        let lifted = ok(pb.pull_left(&p), "lift")?;
        let (rl, _) = ok(reeb_of_cells(&pb.space, lifted.values()), "lifted reeb")?;
        ensure(iso(&rl, &rf), || format!("seed {seed}: lifted Reeb graph differs"))?;
        let (sd, _) = k.barycentric_subdivision();
        let (rs, _) = ok(compute_reeb(&sd, &f.subdivide(k)), "subdivided reeb")?;
        ensure(iso(&rs, &rf), || format!("seed {seed}: subdivided Reeb graph differs"))?;
    }
    Ok("composition, pullback, idempotence and lifting on 50 instances".into())
}

fn triangle_inequality() -> Check {
    for seed in 0..50u64 {
        let inst = common::random_instance(4000 + seed, 3 + (seed % 8) as usize);
        let k = &inst.complex;
        let h = reebedit::PLFunction::new(
            inst.functions[0].values().iter().zip(inst.functions[1].values()).map(|(a, b)| a - b).collect(),
        );
        let (_, p_f) = ok(compute_reeb(k, &inst.functions[0]), "f")?;
        let (rg, p_g) = ok(compute_reeb(k, &inst.functions[1]), "g")?;
        let (_, p_h) = ok(compute_reeb(k, &h), "h")?;
        let c1 = ok(Coupling::new(p_f, p_g.clone()), "c1")?;
        let c2 = if seed % 2 == 0 {
            ok(Coupling::new(p_g, p_h), "c2")?
        } else {
            let other = common::random_instance(5000 + seed, 4);
            let (rh, _) = ok(compute_reeb(&other.complex, &other.functions[0]), "other")?;
            ok(product_coupling(&rg, &rh), "product")?
        };
        let c = ok(compose_couplings(&c1, &c2), "compose")?;
        let (b, b1, b2) = (coupling_bound(&c), coupling_bound(&c1), coupling_bound(&c2));
        ensure(b <= &b1 + &b2, || {
            format!("seed {seed}: {} > {} + {}", scalar::format(&b), scalar::format(&b1), scalar::format(&b2))
        })?;
    }
    Ok("50 triples".into())
}

fn oracle_equivalence() -> Check {
    let mut tried = 0;
    let mut seed = 6000u64;
    while tried < 50 {
        seed += 1;
        let inst = common::random_instance(seed, 4 + (seed % 5) as usize);
        if inst.complex.dimension() < 2 {
            continue;
        }
        tried += 1;
        let (ours, _) = ok(compute_reeb(&inst.complex, &inst.functions[0]), "reeb")?;
        let theirs = common::oracle_reeb(inst.complex.simplices(), inst.functions[0].values());
        ensure(iso(&ours, &theirs), || format!("seed {seed}: graphs differ"))?;
    }
    Ok("50 random 2-complexes".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("1 cylinder Reeb graphs", cylinder_reeb_graphs),
        ("2 cylinder coupling bound", cylinder_coupling),
        ("3 functional distortion gap", distortion_gap),
        ("4 point graph distance", point_graph_distance),
        ("5 homotopy stability", stability_suite),
        ("6 single coupling cost", single_coupling_cost),
        ("7 categorical suite", categorical_suite),
        ("8 triangle inequality", triangle_inequality),
        ("9 oracle equivalence", oracle_equivalence),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        match std::panic::catch_unwind(run) {
            Ok(Ok(note)) => println!("criterion {name}: PASS ({note})"),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
            Err(_) => {
                failed += 1;
                println!("criterion {name}: FAIL (panicked)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
