//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. All comparisons are exact; only wall-clock limits
//! carry a tolerance.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nodal_ias::atlas::{default_frames, polytope_boundary, Crossing, Face2, NodalIASSphere};
use nodal_ias::catalog;
use nodal_ias::certify::{certify_equivalence, verify_certificate};
use nodal_ias::config::PipelineConfig;
use nodal_ias::lattice::{pt2, ShearClass, UniMat2};
use nodal_ias::pipeline::*;
use nodal_ias::render::{render_sphere_net, RenderStyle};
use nodal_ias::surgery::*;
use nodal_ias::toric::{build_polytope, HalfSpace, Polytope, PolytopeSpec};
use nodal_ias::Rat;

const SEED: u64 = 0x5eed_0024;
const CENSUS_LIMIT: Duration = Duration::from_secs(1);
const BUILD_LIMIT: Duration = Duration::from_secs(10);
const CERTIFY_LIMIT: Duration = Duration::from_secs(120);
const LOOPS: usize = 100;
const SURGERY_OPS: usize = 200;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("double-point census", census),
        ("A_t construction", construction),
        ("node-free boundary defects", negative_monodromy),
        ("Gross-Siebert multiplicities", gs_multiplicities),
        ("loop monodromy", loop_monodromy),
        ("gluing order independence", order_independence),
        ("surgery invariants", surgery_invariants),
        ("equivalence certification", certification),
        ("determinism and round trips", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rats(v: &[&str]) -> Vec<Rat> {
    v.iter().map(|s| s.parse().unwrap()).collect()
}

fn catalog_polytopes() -> Vec<(&'static str, Polytope)> {
    catalog::NAMES
        .iter()
        .map(|&n| (n, catalog::by_name(n).unwrap()))
        .collect()
}

/// The projective space blown up at a point, given by hand.
fn blown_up_p3() -> Polytope {
    let hs = [
        ([-1, 0, 0], 1),
        ([0, -1, 0], 1),
        ([0, 0, -1], 1),
        ([1, 1, 1], 1),
        ([-1, -1, -1], 1),
    ]
    .iter()
    .map(|&(n, b)| HalfSpace::new(n, b).unwrap())
    .collect();
    build_polytope(hs).unwrap()
}

fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let q = (&a / &b).0.floor();
        let t = &a - &(&b * &Rat(q));
        a = b;
        b = t;
    }
    a
}

/// Lattice length of an edge from its vertex coordinates.
fn length_oracle(p: &Polytope, e: usize) -> Rat {
    let [a, b] = p.edges[e].vertices;
    (0..3)
        .map(|i| (&p.vertices[b][i] - &p.vertices[a][i]).abs())
        .filter(|x| !x.is_zero())
        .reduce(|g, x| rat_gcd(&g, &x))
        .unwrap()
}

/// Double points on an edge: growth of its length under a uniform unit inflation.
fn degree_oracle(p: &Polytope, e: usize) -> i64 {
    let q = p.inflate(&vec![Rat::one(); p.num_facets()]).unwrap();
    (&length_oracle(&q, e) - &length_oracle(p, e)).to_i64().unwrap()
}

/// Strictly decreasing values `k/60` with `k ≤ 12`, assigned along the ordering.
fn random_t(p: &Polytope, ordering: &[usize], rng: &mut ChaCha8Rng) -> TVector {
    let m = ordering.len();
    for _ in 0..100 {
        let mut ks: Vec<i64> = (1..=12).collect();
        ks.shuffle(rng);
        let mut ks = ks[..m].to_vec();
        ks.sort_unstable_by(|a, b| b.cmp(a));
        let mut t = vec![Rat::zero(); m];
        for (pos, &f) in ordering.iter().enumerate() {
            t[f] = Rat::new(ks[pos], 60);
        }
        let tv = TVector::new(ordering.to_vec(), t);
        if validate_t(p, &tv).is_ok() {
            return tv;
        }
    }
    TVector::linear(ordering.to_vec(), &Rat::new(1, 20))
}

/// Identity, reversed and a random ordering, each with three time vectors.
fn cases(p: &Polytope, rng: &mut ChaCha8Rng) -> Vec<TVector> {
    let m = p.num_facets();
    let id: Vec<usize> = (0..m).collect();
    let rev: Vec<usize> = (0..m).rev().collect();
    let mut shuffled = id.clone();
    while shuffled == id || shuffled == rev {
        shuffled.shuffle(rng);
    }
    let mut out = Vec::new();
    for ord in [id, rev, shuffled] {
        out.push(TVector::linear(ord.clone(), &Rat::new(1, 10)));
        out.push(TVector::linear(ord.clone(), &Rat::new(1, 20)));
        out.push(random_t(p, &ord, rng));
    }
    out
}

fn census() -> Outcome {
    let expected: [&[i64]; 3] = [&[4], &[2], &[2, 3]];
    let mut polys = catalog_polytopes();
    polys.push(("Bl_pt P3", blown_up_p3()));
    for (i, (name, p)) in polys.iter().enumerate() {
        let start = Instant::now();
        let degrees = p.anticanonical_degrees().map_err(|e| format!("{name}: {e}"))?;
        let elapsed = start.elapsed();
        ensure!(elapsed < CENSUS_LIMIT, "{name}: took {elapsed:?}");
        ensure!(degrees.iter().sum::<i64>() == 24, "{name}: degrees {degrees:?}");
        for (e, &d) in degrees.iter().enumerate() {
            ensure!(d == degree_oracle(p, e), "{name} edge {e}: {d} vs oracle");
            if let Some(allowed) = expected.get(i) {
                ensure!(allowed.contains(&d), "{name} edge {e}: degree {d}");
            }
        }
    }
    Ok(format!("sum 24 on {} polytopes", polys.len()))
}

fn construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut runs = 0;
    let mut slowest = Duration::ZERO;
    for (name, p) in catalog_polytopes() {
        for tv in cases(&p, &mut rng) {
            let tag = format!("{name} ord {:?} t {:?}", tv.ordering, tv.t);
            ensure!(validate_t(&p, &tv).is_ok(), "{tag}: invalid time vector");
            let start = Instant::now();
            let a = build_a_t(&p, &tv).map_err(|e| format!("{tag}: {e}"))?;
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            ensure!(elapsed < BUILD_LIMIT, "{tag}: took {elapsed:?}");
            ensure!(a.sphere.node_count() == (24, 24), "{tag}: nodes {:?}", a.sphere.node_count());
            let simple = a.sphere.faces.iter().flat_map(|f| &f.nodes).all(|n| n.multiplicity == 1);
            ensure!(simple, "{tag}: non-simple node");
            extend_and_check(a.sphere.clone()).map_err(|e| format!("{tag}: {e}"))?;
            ensure!(a.sphere.total_defect().ok, "{tag}: total defect");
            runs += 1;
        }
    }
    Ok(format!("{runs} builds, 24 simple nodes each, slowest {slowest:.2?}"))
}

fn negative_monodromy() -> Outcome {
    let mut edges = 0;
    for (name, p) in catalog_polytopes() {
        let s = polytope_boundary(&p, &default_frames(&p).unwrap()).map_err(|e| e.to_string())?;
        let defects = edge_defects(&s).map_err(|e| e.to_string())?;
        ensure!(defects.len() == p.edges.len(), "{name}: {} defective edges", defects.len());
        for (e, class) in defects {
            let k = degree_oracle(&p, e);
            let ShearClass::Shear { k: got, .. } = class else {
                return Err(format!("{name} edge {e}: {class:?}"));
            };
            ensure!(got == k, "{name} edge {e}: shear({got}) vs degree {k}");
            let d = s.edge_direction(e).unwrap();
            let l = s.edge_loop(e).unwrap();
            ensure!(l.linear == UniMat2::node_shear(d, k), "{name} edge {e}: loop {:?}", l.linear);
            edges += 1;
        }
        ensure!(extend_and_check(s).is_err(), "{name}: node-free boundary extended");
    }
    Ok(format!("{edges} edges carry shear(degree)"))
}

fn gs_multiplicities() -> Outcome {
    let mut edges = 0;
    for (name, p) in catalog_polytopes() {
        let s = build_gs(&p).map_err(|e| format!("{name}: {e}"))?;
        for e in 0..p.edges.len() {
            let k = s.edges[e].node.as_ref().map_or(0, |n| n.multiplicity);
            ensure!(k == p.anticanonical_edge_degree(e).unwrap(), "{name} edge {e}: k = {k}");
            ensure!(k == degree_oracle(&p, e), "{name} edge {e}: k = {k} vs oracle");
            edges += 1;
        }
    }
    Ok(format!("{edges} edges"))
}

/// A random walk of edge crossings from `start`; returns the word and the end face.
fn random_path(s: &NodalIASSphere, start: usize, rng: &mut ChaCha8Rng) -> (Vec<Crossing>, usize) {
    let mut face = start;
    let mut word = Vec::new();
    for _ in 0..rng.gen_range(0..7) {
        let sides = &s.faces[face].sides;
        let edge = sides[rng.gen_range(0..sides.len())];
        let vertex = s.edges[edge].vertices[rng.gen_range(0..2)];
        word.push(Crossing::Edge { edge, vertex });
        face = s.other_face(edge, face).unwrap();
    }
    (word, face)
}

/// Walking `word` backwards undoes it.
fn reversed(word: &[Crossing]) -> Vec<Crossing> {
    word.iter()
        .rev()
        .map(|c| match *c {
            Crossing::Wedge { node, ccw } => Crossing::Wedge { node, ccw: !ccw },
            ref edge => edge.clone(),
        })
        .collect()
}

/// Crosses the three edges at a corner of `face`, ending where it began.
fn around_vertex(s: &NodalIASSphere, face: usize, rng: &mut ChaCha8Rng) -> Vec<Crossing> {
    let corners = &s.faces[face].corners;
    let v = corners[rng.gen_range(0..corners.len())];
    let mut cur = face;
    let mut prev = usize::MAX;
    let mut word = Vec::new();
    for _ in 0..s.vertices[v].edges.len() {
        let edge = *s.vertices[v]
            .edges
            .iter()
            .find(|&&e| e != prev && s.edges[e].faces.contains(&cur))
            .unwrap();
        word.push(Crossing::Edge { edge, vertex: v });
        cur = s.other_face(edge, cur).unwrap();
        prev = edge;
    }
    assert_eq!(cur, face);
    if rng.gen_bool(0.5) {
        reversed(&word)
    } else {
        word
    }
}

fn loop_monodromy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let builds: Vec<_> = catalog_polytopes()
        .into_iter()
        .map(|(n, p)| {
            let tv = TVector::linear((0..p.num_facets()).collect(), &Rat::new(1, 10));
            (n, build_a_t(&p, &tv).unwrap().sphere)
        })
        .collect();
    let mut lengths = 0;
    for i in 0..LOOPS {
        let (name, s) = &builds[i % builds.len()];
        let start = rng.gen_range(0..s.faces.len());
        let mut word = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let (w, end) = random_path(s, start, &mut rng);
            word.extend(w.iter().cloned());
            word.extend(around_vertex(s, end, &mut rng));
            word.extend(reversed(&w));
        }
        lengths += word.len();
        let m = s.loop_monodromy(start, &word).map_err(|e| format!("{name}: {e}"))?;
        ensure!(m.map.is_identity(), "{name} loop {i}: {:?}", m.map);
    }
    let mut single = 0;
    while single < LOOPS {
        let (name, s) = &builds[single % builds.len()];
        let start = rng.gen_range(0..s.faces.len());
        let (w, end) = random_path(s, start, &mut rng);
        let nodes = s.faces[end].nodes.len();
        if nodes == 0 {
            continue;
        }
        let mut word = w.clone();
        word.push(Crossing::Wedge {
            node: rng.gen_range(0..nodes),
            ccw: rng.gen_bool(0.5),
        });
        word.extend(reversed(&w));
        let m = s.loop_monodromy(start, &word).map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            matches!(m.class, ShearClass::Shear { k: 1, .. }),
            "{name} single-node loop: {:?}",
            m.class
        );
        let l = m.map.linear;
        ensure!(l.trace() == 2 && l != UniMat2::IDENTITY, "{name}: {l:?}");
        single += 1;
    }
    Ok(format!("{LOOPS} node-free loops (total length {lengths}) trivial, {LOOPS} single-node loops shear(1)"))
}

fn order_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut flips = 0;
    for (name, p) in catalog_polytopes() {
        let tv = TVector::linear((0..p.num_facets()).collect(), &Rat::new(1, 10));
        let a = build_a_t(&p, &tv).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let mut o1: Vec<usize> = (0..p.vertices.len()).collect();
            let mut o2 = o1.clone();
            o1.shuffle(&mut rng);
            o2.shuffle(&mut rng);
            let g1 = glue_sphere(&a.diagrams, &p, Some(&o1)).map_err(|e| format!("{name}: {e}"))?;
            let g2 = glue_sphere(&a.diagrams, &p, Some(&o2)).map_err(|e| format!("{name}: {e}"))?;
            let iso = edge_flip_isomorphism(&g1, &g2).map_err(|e| format!("{name}: {e}"))?;
            for e in 0..p.edges.len() {
                let flipped = g1.edges[e].vertices != g2.edges[e].vertices;
                ensure!(flipped == iso.flipped.contains(&e), "{name} edge {e}: flip mismatch");
                let len = &g1.edges[e].length;
                let want = if flipped { Rat::zero() } else { len.clone() };
                ensure!(iso.map_param(e, len) == want, "{name} edge {e}: parameter map");
            }
            extend_and_check(g2).map_err(|e| format!("{name}: {e}"))?;
            flips += iso.flipped.len();
        }
    }
    Ok(format!("9 order pairs, {flips} flipped edges"))
}

/// Quantities every slide, merge, split and cut move must keep.
#[derive(Debug, PartialEq)]
struct SurgeryInvariants {
    /// Side-hugging loops, affine.
    transports: Vec<nodal_ias::lattice::AffineMap2>,
    /// Loop around the whole boundary.
    boundary: nodal_ias::lattice::AffineMap2,
    area: Rat,
    side_lengths: Vec<Rat>,
    multiplicity: i64,
}

fn invariants(f: &Face2) -> SurgeryInvariants {
    let transports: Vec<_> = (0..f.len()).map(|i| f.transport(i).unwrap()).collect();
    let boundary = transports
        .iter()
        .fold(nodal_ias::lattice::AffineMap2::identity(), |acc, t| acc.compose(t));
    SurgeryInvariants {
        transports,
        boundary,
        area: f.affine_area().unwrap(),
        side_lengths: (0..f.len()).map(|i| f.side_length(i).unwrap()).collect(),
        multiplicity: f.total_multiplicity(),
    }
}

/// Area oracle: the polygon by the shoelace formula, minus `k h² / 2` per node.
fn area_oracle(f: &Face2) -> Rat {
    let n = f.polygon.len();
    let mut twice = Rat::zero();
    for i in 0..n {
        let (a, b) = (&f.polygon[i], &f.polygon[(i + 1) % n]);
        twice = &twice + &(&(&a[0] * &b[1]) - &(&a[1] * &b[0]));
    }
    let mut area = &twice * &Rat::new(1, 2);
    for node in &f.nodes {
        let h = f.height(node.side, &node.position).unwrap();
        area = &area - &(&(&h * &h) * &Rat::new(node.multiplicity, 2));
    }
    area
}

fn start_diagram() -> FaceDiagram {
    let sq = Face2::flat(vec![pt2(0, 0), pt2(12, 0), pt2(12, 12), pt2(0, 12)]);
    let mut d = FaceDiagram::new(sq).unwrap();
    for (side, c, a) in [
        (0, "1", "1"),
        (0, "3", "1"),
        (0, "6", "1"),
        (0, "9", "1/2"),
        (1, "2", "1/2"),
        (1, "5", "1/2"),
        (2, "2", "2"),
        (3, "4", "1"),
        (3, "7", "1"),
    ] {
        d = nodal_blowup(&d, side, &side_rat(c), &side_rat(a)).unwrap();
    }
    d
}

fn side_rat(s: &str) -> Rat {
    s.parse().unwrap()
}

fn random_op(d: &FaceDiagram, rng: &mut ChaCha8Rng) -> Option<SurgeryOp> {
    let nodes = &d.face.nodes;
    let pick = |rng: &mut ChaCha8Rng, ks: Vec<usize>| ks.get(rng.gen_range(0..ks.len().max(1))).copied();
    let half = Rat::new(rng.gen_range(-4..=4), 2);
    let along = |k: usize, s: &Rat| {
        let n = &nodes[k];
        [&n.position[0] + &s.mul_int(n.eigen[0]), &n.position[1] + &s.mul_int(n.eigen[1])]
    };
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(0..nodes.len());
            Some(SurgeryOp::Slide { node: k, to: along(k, &half) })
        }
        1 => {
            let mut pairs = Vec::new();
            for (k, n) in nodes.iter().enumerate() {
                for (j, m) in nodes.iter().enumerate() {
                    let dx = &m.position[0] - &n.position[0];
                    let dy = &m.position[1] - &n.position[1];
                    let collinear = (&dx.mul_int(n.eigen[1]) - &dy.mul_int(n.eigen[0])).is_zero();
                    if j != k && m.side == n.side && m.cut == n.cut && collinear {
                        pairs.push((k, j));
                    }
                }
            }
            let i = pick(rng, (0..pairs.len()).collect())?;
            Some(SurgeryOp::Merge { nodes: vec![pairs[i].0, pairs[i].1] })
        }
        2 => {
            let k = pick(rng, (0..nodes.len()).filter(|&k| nodes[k].multiplicity > 1).collect())?;
            let step = Rat::new(rng.gen_range(1..=3), 4);
            let positions = (0..nodes[k].multiplicity)
                .map(|i| along(k, &(&half + &step.mul_int(i))))
                .collect();
            Some(SurgeryOp::Split { node: k, positions })
        }
        _ => {
            let k = rng.gen_range(0..nodes.len());
            let n = &nodes[k];
            let j = if rng.gen_bool(0.5) { 1 } else { -1 };
            Some(SurgeryOp::MoveCut {
                node: k,
                cut: [n.cut[0] + j * n.eigen[0], n.cut[1] + j * n.eigen[1]],
            })
        }
    }
}

fn surgery_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut d = start_diagram();
    let base = invariants(&d.face);
    ensure!(base.area == area_oracle(&d.face), "area oracle disagrees on the start diagram");
    let mut done = [0usize; 4];
    let mut attempts = 0;
    while done.iter().sum::<usize>() < SURGERY_OPS {
        attempts += 1;
        ensure!(attempts < 20 * SURGERY_OPS, "only {done:?} operations applied");
        let Some(op) = random_op(&d, &mut rng) else { continue };
        let Ok(next) = d.apply(&op) else { continue };
        let got = invariants(&next.face);
        ensure!(got == base, "{op:?} changed {got:?}");
        ensure!(got.area == area_oracle(&next.face), "{op:?}: area oracle");
        done[match op {
            SurgeryOp::Slide { .. } => 0,
            SurgeryOp::Merge { .. } => 1,
            SurgeryOp::Split { .. } => 2,
            _ => 3,
        }] += 1;
        d = next;
    }
    ensure!(done.iter().all(|&n| n > 0), "operation mix {done:?}");
    let replayed = FaceDiagram::replay(&d.log).map_err(|e| e.to_string())?;
    ensure!(replayed == d, "log replay differs");

    let mut blowups = 0;
    let mut d = start_diagram();
    for _ in 0..200 {
        let side = rng.gen_range(0..4);
        let c = Rat::new(rng.gen_range(1..96), 8);
        let a = Rat::new(rng.gen_range(1..8), 8);
        let Ok(next) = nodal_blowup(&d, side, &c, &a) else { continue };
        let before = invariants(&d.face);
        let after = invariants(&next.face);
        let drop = &a * &a * Rat::new(1, 2);
        ensure!(&before.area - &after.area == drop, "blow-up area change");
        ensure!(after.area == area_oracle(&next.face), "blow-up area oracle");
        ensure!(
            &before.side_lengths[side] - &after.side_lengths[side] == a,
            "blow-up side length change"
        );
        blowups += 1;
        d = next;
    }
    ensure!(blowups > 10, "only {blowups} blow-ups fit");
    Ok(format!(
        "{SURGERY_OPS} ops (slide {}, merge {}, split {}, cut {}), {blowups} blow-ups",
        done[0], done[1], done[2], done[3]
    ))
}

fn certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut runs = 0;
    let mut slowest = Duration::ZERO;
    for (name, p) in catalog_polytopes() {
        for tv in cases(&p, &mut rng) {
            let tag = format!("{name} ord {:?} t {:?}", tv.ordering, tv.t);
            let start = Instant::now();
            let a = build_a_t(&p, &tv).map_err(|e| format!("{tag}: {e}"))?;
            let gs = build_gs(&p.inflate(&tv.t).unwrap()).map_err(|e| format!("{tag}: {e}"))?;
            let cert = certify_equivalence(&p, &a.schedule, &tv, &a.sphere, &gs).map_err(|e| format!("{tag}: {e}"))?;
            let verdict = verify_certificate(&cert, &a.sphere, &gs);
            ensure!(verdict.pass, "{tag}: replay {verdict:?}");
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            ensure!(elapsed < CERTIFY_LIMIT, "{tag}: took {elapsed:?}");
            runs += 1;
        }
    }
    Ok(format!("{runs} certificates verified, slowest {slowest:.2?}"))
}

fn determinism() -> Outcome {
    let mut checked = 0;
    for (name, p) in catalog_polytopes() {
        let tv = TVector::linear((0..p.num_facets()).rev().collect(), &Rat::new(1, 10));
        let run = || {
            let a = build_a_t(&p, &tv).unwrap();
            let gs = build_gs(&p.inflate(&tv.t).unwrap()).unwrap();
            let cert = certify_equivalence(&p, &a.schedule, &tv, &a.sphere, &gs).unwrap();
            (
                serde_json::to_string_pretty(&a.sphere).unwrap(),
                serde_json::to_string_pretty(&cert).unwrap(),
                render_sphere_net(&a.sphere, &RenderStyle::default()),
            )
        };
        let first = run();
        ensure!(first == run(), "{name}: repeated run differs");

        let sphere: NodalIASSphere = serde_json::from_str(&first.0).map_err(|e| e.to_string())?;
        ensure!(serde_json::to_string_pretty(&sphere).unwrap() == first.0, "{name}: sphere round trip");
        let cert: nodal_ias::certify::EquivalenceCertificate =
            serde_json::from_str(&first.1).map_err(|e| e.to_string())?;
        ensure!(serde_json::to_string_pretty(&cert).unwrap() == first.1, "{name}: certificate round trip");

        let spec: PolytopeSpec = serde_json::from_str(&serde_json::to_string(&p.spec()).unwrap()).unwrap();
        ensure!(spec == p.spec(), "{name}: polytope spec round trip");
        let config = PipelineConfig {
            polytope: nodal_ias::config::PolytopeRef::Spec(p.spec()),
            ordering: Some(tv.ordering.clone()),
            t: Some(tv.t.clone()),
        };
        ensure!(PipelineConfig::from_json(&config.to_json()).unwrap() == config, "{name}: config round trip");
        let log = &build_a_t(&p, &tv).unwrap().diagrams[0].log;
        let back: SurgeryLog = serde_json::from_str(&serde_json::to_string(log).unwrap()).unwrap();
        ensure!(&back == log, "{name}: surgery log round trip");
        for x in rats(&["0", "-3/7", "22/4", "5"]) {
            let y: Rat = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
            ensure!(x == y, "rational {x} round trip");
        }
        checked += 1;
    }
    Ok(format!("{checked} polytopes: byte-identical reruns, lossless JSON"))
}
