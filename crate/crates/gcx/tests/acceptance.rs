//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

mod common;

use common::{all_labeled, bareiss_rank, brute_form, permutations, plain_directed};
use gcx::biweight::{fw_basis, holieb_degree, q_basis, BiWeightedGraph, FwGC, FwPart, QPart, WeightCap, QGC};
use gcx::canon::{canonical_form, Structure};
use gcx::chainmaps::{cone_square_failures, verify_named, ChainWindow, MapName};
use gcx::exactla::{in_column_span, q, rank, Field};
use gcx::gcomplex::{d_squared_failures, degree_bound_check, Base, Flavor, GraphComplex};
use gcx::grtwitness::{mixed_window, tetrahedron_witnesses, MixedGC};
use gcx::homology::{assemble, basis_at, build_basis, cohomology_dims, loop_graph, Window};

// Runtime budgets.
const WITNESS_LIMIT: Duration = Duration::from_secs(10);
const LOOP_LIMIT: Duration = Duration::from_secs(5);
const BOUND_LIMIT: Duration = Duration::from_secs(60);
const TETRA_LIMIT: Duration = Duration::from_secs(300);

// Windows for the d² suites.
const FULL: (usize, usize) = (4, 6);
const REDUCED: (usize, usize) = (5, 8);
const DECORATED: (usize, usize) = (3, 5);

const HOLIEB_SAMPLES: usize = 1000;
const ORACLE_MAX_DIM: usize = 50;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, format!("took {:.2?}, budget {limit:?}", t.elapsed()))
}

fn tetrahedron_matrix() -> Outcome {
    let t = Instant::now();
    let r = tetrahedron_witnesses(Field::Rational).map_err(|e| e.to_string())?;
    within(t, WITNESS_LIMIT)?;
    ensure(r.matches_reference, "matrix differs from the reference beyond a ±1 diagonal normalization")?;
    ensure(r.s.alpha_closed && r.t.alpha_closed, "α not closed")?;
    ensure(!r.s.alpha_in_span && !r.t.alpha_in_span, "α in the image")?;
    ensure(!r.difference_in_span, "α^s − α^t in the combined image")?;
    ensure(r.pass, "report verdict is false")?;
    Ok(format!(
        "10x11 matrix matches, rows {:?}, cols {:?}, α sign {}; α^s, α^t, α^s−α^t outside the image",
        r.row_signs, r.col_signs, r.alpha_sign
    ))
}

fn loop_graphs() -> Outcome {
    let t = Instant::now();
    let mut found = Vec::new();
    for k in [2i64, 3] {
        let f = Flavor::new(Base::LoopGraphs, k);
        let r = cohomology_dims(&f, 1, 1 - k, 9 - k, Window { v_max: 12 }, Field::Rational, false)
            .map_err(|e| e.to_string())?;
        for i in 1..=9usize {
            let expect = (i as i64 - (2 * k + 1)).rem_euclid(4) == 0;
            ensure(f.class_of(&loop_graph(i)).is_some() == expect, format!("k={k} i={i}: class vanishing is wrong"))?;
            let h = r.h(i as i64 - k).unwrap_or(0);
            ensure(h == usize::from(expect), format!("k={k} i={i}: H = {h}"))?;
            if expect {
                found.push(format!("k={k}:i={i}"));
            }
        }
    }
    within(t, LOOP_LIMIT)?;
    Ok(format!("nonzero at {}", found.join(" ")))
}

fn degree_bounds() -> Outcome {
    let t = Instant::now();
    let mut out = Vec::new();
    for (k, b) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let r = degree_bound_check(k, b).map_err(|e| e.to_string())?;
        ensure(r.verified_empty_above, format!("k={k} b={b}: generator above the bound"))?;
        out.push(format!("(k={k},b={b}) max {}", r.max_degree));
    }
    within(t, BOUND_LIMIT)?;
    Ok(out.join(", "))
}

fn tetrahedron_class() -> Outcome {
    let t = Instant::now();
    let f = Flavor::new(Base::UndirectedGC, 2);
    let w = Window::default();
    let c0 = build_basis(&f, 3, 0, w).map_err(|e| e.to_string())?.classes;
    let cm1 = build_basis(&f, 3, -1, w).map_err(|e| e.to_string())?.classes;
    let tetra = Structure::plain(4, vec![(0, 1, 0), (0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 0), (2, 3, 0)]);
    let (key, _) = f.class_of(&tetra).ok_or("tetrahedron vanishes")?;
    let pos = c0.iter().position(|k| *k == key).ok_or("tetrahedron missing from C⁰")?;
    ensure(f.d_key(&key).is_zero(), "tetrahedron is not closed")?;
    let m = assemble(&f, &cm1, &c0).map_err(|e| e.to_string())?;
    let mut v = vec![q(0); c0.len()];
    v[pos] = q(1);
    let member = in_column_span(&m, &v).map_err(|e| e.to_string())?.member;
    ensure(!member, "tetrahedron is exact")?;
    let h = cohomology_dims(&f, 3, 0, 0, w, Field::Rational, false).map_err(|e| e.to_string())?;
    within(t, TETRA_LIMIT)?;
    Ok(format!(
        "dim C⁰ = {}, dim C⁻¹ = {}, rank d⁻¹ = {}, H⁰ = {}",
        c0.len(),
        cm1.len(),
        rank(&m),
        h.h(0).unwrap_or(0)
    ))
}

fn flavor_window(f: &Flavor, (vm, em): (usize, usize)) -> Result<Vec<String>, String> {
    let mut keys = Vec::new();
    for v in 1..=vm {
        for e in 0..=em {
            keys.extend(basis_at(f, v, e).map_err(|e| e.to_string())?);
        }
    }
    Ok(keys)
}

fn d_squared() -> Outcome {
    let mut summary = Vec::new();
    let mut record = |name: String, keys: usize, bad: usize| -> Result<(), String> {
        ensure(keys > 0, format!("{name}: empty window"))?;
        ensure(bad == 0, format!("{name}: {bad} of {keys} fail"))?;
        summary.push(format!("{name}:{keys}"));
        Ok(())
    };
    for k in [2, 3] {
        for (f, w) in [
            (Flavor::new(Base::UndirectedFull, k), FULL),
            (Flavor::new(Base::UndirectedGC, k), REDUCED),
            (Flavor::new(Base::DirectedFull, k), FULL),
            (Flavor::new(Base::DirectedDGC, k), REDUCED),
            (Flavor::wheeled(k), REDUCED),
        ] {
            let keys = flavor_window(&f, w)?;
            record(format!("{}_{k}", f.name()), keys.len(), d_squared_failures(&f, &keys).len())?;
        }
        let qgc = QGC::new(k, QPart::All);
        let fw = FwGC::new(k, WeightCap::total(3), FwPart::All);
        let (mut qk, mut fk) = (Vec::new(), Vec::new());
        for v in 1..=DECORATED.0 {
            for e in 0..=DECORATED.1 {
                qk.extend(q_basis(&qgc, v, e).map_err(|e| e.to_string())?);
                fk.extend(fw_basis(&fw, v, e).map_err(|e| e.to_string())?);
            }
        }
        record(format!("qGC_{k}"), qk.len(), d_squared_failures(&qgc, &qk).len())?;
        record(format!("fwGC_{k}"), fk.len(), d_squared_failures(&fw, &fk).len())?;
    }
    let hat = MixedGC::hat();
    let keys = mixed_window(&hat, REDUCED.0, REDUCED.1).map_err(|e| e.to_string())?;
    record(hat.name(), keys.len(), d_squared_failures(&hat, &keys).len())?;
    Ok(summary.join(" "))
}

fn chain_maps() -> Outcome {
    let w = ChainWindow { v_max: 3, e_max: 5 };
    let mut out = Vec::new();
    for name in MapName::all() {
        let r = verify_named(name, 3, w).map_err(|e| e.to_string())?;
        if name.is_control() {
            ensure(!r.pass, format!("control {} passed", r.map))?;
            out.push(format!("{}:fails", r.map));
        } else {
            ensure(r.pass, format!("{} fails: {:?}", r.map, r.witnesses.first()))?;
            ensure(r.nonzero_images > 0, format!("{} is zero on the window", r.map))?;
            out.push(format!("{}:ok", r.map));
        }
    }
    let bad = cone_square_failures(3, w).map_err(|e| e.to_string())?;
    ensure(bad.is_empty(), format!("cone d² fails on {} elements", bad.len()))?;
    out.push("cone:ok".into());
    Ok(out.join(" "))
}

fn holieb_degrees() -> Outcome {
    let mut out = Vec::new();
    for k in [2, 3] {
        let fw = FwGC::new(k, WeightCap::total(4), FwPart::All);
        let mut graphs = Vec::new();
        'fill: for v in 1..=4 {
            for e in 0..=5 {
                for key in fw_basis(&fw, v, e).map_err(|e| e.to_string())? {
                    graphs.push(BiWeightedGraph::from_structure(&fw.parse_key(&key)));
                    if graphs.len() == HOLIEB_SAMPLES {
                        break 'fill;
                    }
                }
            }
        }
        ensure(graphs.len() == HOLIEB_SAMPLES, format!("only {} graphs enumerated", graphs.len()))?;
        for (p, qq) in [(1, 1), (0, 1), (2, -1)] {
            for g in &graphs {
                let d = holieb_degree(g, p, qq).map_err(|e| format!("(p,q)=({p},{qq}): {e}"))?;
                ensure(d.from_graph == d.from_corollas, "formulas disagree")?;
            }
        }
        out.push(format!("k={k}: {} graphs x 3 (p,q)", graphs.len()));
    }
    Ok(out.join(", "))
}

fn oracles() -> Outcome {
    let rules = plain_directed(false);
    let mut classes = 0;
    for v in 1..=4 {
        let perms = permutations(v);
        for e in 0..=5 {
            let mut pairs = std::collections::HashSet::new();
            let (mut a, mut b) = (std::collections::HashSet::new(), std::collections::HashSet::new());
            for g in all_labeled(v, e) {
                let (x, y) = (canonical_form(&g, &rules).form, brute_form(&g, &perms));
                a.insert(x.clone());
                b.insert(y.clone());
                pairs.insert((x, y));
            }
            ensure(a.len() == b.len() && pairs.len() == a.len(), format!("partitions differ at v={v} e={e}"))?;
            classes += a.len();
        }
    }
    let mut checked = 0;
    let flavors = [
        Flavor::new(Base::UndirectedGC, 2),
        Flavor::new(Base::UndirectedGC, 3),
        Flavor::new(Base::DirectedDGC, 3),
        Flavor::new(Base::DirectedFull, 2),
    ];
    for f in &flavors {
        for v in 1..=5 {
            for e in 0..=8 {
                let cols = basis_at(f, v, e).map_err(|e| e.to_string())?;
                if cols.is_empty() || cols.len() > ORACLE_MAX_DIM {
                    continue;
                }
                let rows = basis_at(f, v + 1, e + 1).map_err(|e| e.to_string())?;
                if rows.is_empty() || rows.len() > ORACLE_MAX_DIM {
                    continue;
                }
                let m = assemble(f, &cols, &rows).map_err(|e| e.to_string())?;
                let dense: Vec<Vec<i64>> = m
                    .to_dense()
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_integer().try_into().unwrap()).collect())
                    .collect();
                ensure(rank(&m) == bareiss_rank(&dense), format!("{} v={v} e={e}: ranks differ", f.name()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{classes} isomorphism classes agree; {checked} differential matrices agree"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("tetrahedron matrix and α witnesses", tetrahedron_matrix),
        ("loop-graph cohomology", loop_graphs),
        ("degree bound", degree_bounds),
        ("tetrahedron class in GC_2", tetrahedron_class),
        ("d² = 0 suites", d_squared),
        ("chain maps", chain_maps),
        ("holieb degree formulas", holieb_degrees),
        ("oracle equivalence", oracles),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {} {name} ({secs:.2}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.2}s): {msg}", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
