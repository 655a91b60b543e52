//! Acceptance criteria 1–9, one PASS/FAIL line each.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nsbox::quantum::{born_box, gghz_state, preset_settings, snap_to_exact, FloatBox, Preset, SnapOptions};
use nsbox_core::boxes::{
    bb84_family, chsh_family, from_correlators, make_vertex, mermin_family, mix, polytope_vertices, svetlichny_family,
    white_noise,
};
use nsbox_core::inequalities::svetlichny_value;
use nsbox_core::membership::{lp_feasible, verify_witness, Polytope};
use nsbox_core::strengths::{g_quantity, q_quantity, strength_lp};
use nsbox_core::superlocality::{
    appendix_decomposition, appendix_target, bipartite_verdict, genuine_report, search_decomposition,
    superlocality_verdict, verify_bipartite_verdict, verify_rank_certificate, verify_verdict, AppendixKind, PairClass,
    RankCertificate, Status,
};
use nsbox_core::{Cut, Scalar, TripartiteBox, VertexLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn s(text: &str) -> Scalar {
    text.parse().expect("scalar literal")
}

fn sqrt2() -> Scalar {
    Scalar::sqrt2()
}

fn inequality_exactness() -> Outcome {
    for mu in [r(1, 4), r(1, 2), Scalar::inv_sqrt2(), Scalar::one()] {
        let b = svetlichny_family(&mu).map_err(|e| e.to_string())?;
        let value = svetlichny_value(&b, [0, 0, 0, 0]);
        let expected = Scalar::int(4) * sqrt2() * &mu;
        ensure(value == expected, || format!("S_0000(SvF({mu})) = {value}, expected {expected}"))?;
        let violated = value > Scalar::int(4);
        ensure(violated == (mu > Scalar::inv_sqrt2()), || format!("threshold wrong at mu = {mu}"))?;
    }
    Ok("S_0000(SvF(mu)) = 4*sqrt2*mu exactly at 4 points; violation iff mu > 1/sqrt2".into())
}

fn strength_reproduction() -> Outcome {
    for mu in [r(1, 4), r(1, 2), Scalar::inv_sqrt2(), Scalar::one()] {
        let b = svetlichny_family(&mu).map_err(|e| e.to_string())?;
        let rep = strength_lp(&b).map_err(|e| format!("SvF({mu}): {e}"))?;
        let want = &mu * Scalar::inv_sqrt2();
        ensure(rep.svetlichny_strength == want, || format!("SvF({mu}) strength {}", rep.svetlichny_strength))?;
        ensure(g_quantity(&b) == Scalar::int(4) * sqrt2() * &mu, || format!("G(SvF({mu})) = {}", g_quantity(&b)))?;
        ensure(rep.residual == white_noise(), || format!("SvF({mu}) residual is not white noise"))?;
    }
    for nu in [r(1, 4), r(1, 2), r(3, 4), Scalar::one()] {
        let b = mermin_family(&nu).map_err(|e| e.to_string())?;
        let rep = strength_lp(&b).map_err(|e| format!("MF({nu}): {e}"))?;
        ensure(rep.mermin_strength == nu, || format!("MF({nu}) strength {}", rep.mermin_strength))?;
        ensure(rep.svetlichny_strength.is_zero(), || format!("MF({nu}) has Svetlichny strength"))?;
        ensure(q_quantity(&b) == Scalar::int(4) * &nu, || format!("Q(MF({nu})) = {}", q_quantity(&b)))?;
        ensure(rep.residual == white_noise(), || format!("MF({nu}) residual is not white noise"))?;
    }
    Ok("SvF: mu/sqrt2 and G = 4*sqrt2*mu; MF: nu and Q = 4nu; residuals are white noise".into())
}

fn membership_case(b: &TripartiteBox, p: Polytope, expect: bool, what: &str) -> Result<(), String> {
    let w = lp_feasible(b, p);
    ensure(w.feasible == expect, || format!("{what} in {p}: got {}, expected {expect}", w.feasible))?;
    ensure(verify_witness(b, &w), || format!("{what} in {p}: witness does not verify"))
}

fn membership_thresholds() -> Outcome {
    let svf_local = [r(1, 16), r(1, 8), r(1, 4), r(3, 8), r(1, 2), r(5, 8), r(11, 16), Scalar::inv_sqrt2()];
    let svf_nonlocal = [r(7072, 10000), r(3, 4), r(7, 8), Scalar::one()];
    let mf_local = [r(1, 16), r(1, 8), r(3, 16), r(1, 4), r(5, 16), r(3, 8), r(7, 16), r(1, 2)];
    let mf_two_local = [r(1, 8), r(1, 4), r(3, 8), r(1, 2), r(51, 100), r(5, 8), r(3, 4), r(7, 8), Scalar::one()];
    let mut checked = 0;
    for mu in &svf_local {
        membership_case(&svetlichny_family(mu).unwrap(), Polytope::Local, true, &format!("SvF({mu})"))?;
        checked += 1;
    }
    for mu in &svf_nonlocal {
        membership_case(&svetlichny_family(mu).unwrap(), Polytope::Local, false, &format!("SvF({mu})"))?;
        checked += 1;
    }
    for nu in &mf_local {
        membership_case(&mermin_family(nu).unwrap(), Polytope::Local, true, &format!("MF({nu})"))?;
        checked += 1;
    }
    for nu in &mf_two_local {
        let b = mermin_family(nu).unwrap();
        membership_case(&b, Polytope::TwoLocal, true, &format!("MF({nu})"))?;
        if *nu > r(1, 2) {
            membership_case(&b, Polytope::Local, false, &format!("MF({nu})"))?;
        }
        checked += 1;
    }
    membership_case(&svetlichny_family(&Scalar::one()).unwrap(), Polytope::TwoLocal, false, "SvF(1)")?;
    Ok(format!("{} parameter points, every witness and Farkas certificate re-verified", checked + 1))
}

fn rank_three_everywhere(b: &TripartiteBox, what: &str) -> Result<(), String> {
    let rep = genuine_report(b, 2);
    ensure(rep.genuine, || format!("{what}: not genuinely superlocal"))?;
    for (v, cut) in rep.verdicts.iter().zip(Cut::ALL) {
        let cert = v.certificate.ok_or_else(|| format!("{what} {cut}: no certificate"))?;
        ensure(cert == RankCertificate { rank: 3, d: 2 }, || format!("{what} {cut}: certificate {cert:?}"))?;
        ensure(verify_rank_certificate(b, cut, &cert) && verify_verdict(b, v), || {
            format!("{what} {cut}: column-order rank disagrees")
        })?;
    }
    Ok(())
}

fn theorems() -> Outcome {
    for mu in [r(1, 8), r(1, 4), r(1, 2), Scalar::inv_sqrt2()] {
        rank_three_everywhere(&svetlichny_family(&mu).unwrap(), &format!("SvF({mu})"))?;
    }
    for nu in [r(1, 4), r(1, 2), r(3, 4), Scalar::one()] {
        rank_three_everywhere(&mermin_family(&nu).unwrap(), &format!("MF({nu})"))?;
    }
    Ok("8 boxes genuinely superlocal at d=2, rank 3 on every cut by both elimination orders".into())
}

fn appendix_fidelity() -> Outcome {
    let grids = [
        (AppendixKind::SvfA, vec![r(1, 16), r(1, 4), r(1, 2), r(5, 8), Scalar::inv_sqrt2()], PairClass::Local),
        (AppendixKind::MfC, vec![r(1, 16), r(1, 8), r(1, 4), r(3, 8), r(1, 2)], PairClass::Local),
        (AppendixKind::MfD, vec![r(1, 8), r(1, 4), r(1, 2), r(3, 4), Scalar::one()], PairClass::NonSignaling),
    ];
    let mut n = 0;
    for (kind, params, class) in grids {
        for p in params {
            let w = appendix_decomposition(kind, &p).map_err(|e| format!("{kind:?}({p}): {e}"))?;
            let target = appendix_target(kind, &p).map_err(|e| e.to_string())?;
            ensure(w.reconstruct() == target, || format!("{kind:?}({p}) does not reconstruct"))?;
            ensure(w.class == class && w.verify(&target), || format!("{kind:?}({p}) factor class check failed"))?;
            ensure(w.terms.iter().all(|t| class.admits(&t.pair)), || format!("{kind:?}({p}) factor outside class"))?;
            ensure(w.dimension() == 4, || format!("{kind:?}({p}) has d = {}", w.dimension()))?;
            n += 1;
        }
    }
    Ok(format!("{n} decompositions reconstruct exactly with d = 4 and class-checked factors"))
}

fn appendix_b() -> Outcome {
    for (name, b) in [
        ("SvF(1/2)", svetlichny_family(&r(1, 2)).unwrap()),
        ("MF(1/2)", mermin_family(&r(1, 2)).unwrap()),
    ] {
        let found = search_decomposition(&b, Cut::A, 2, PairClass::Local);
        ensure(found.is_none(), || format!("{name}: unexpected d=2 local decomposition"))?;
    }
    Ok("no d=2 A|BC decomposition with local pair factors for SvF(1/2) or MF(1/2)".into())
}

fn quantum_round_trip() -> Outcome {
    let ghz = gghz_state(std::f64::consts::FRAC_PI_4);
    let opts = SnapOptions::default();
    let sv = snap_to_exact(&born_box(&ghz, &preset_settings(Preset::Svetlichny)), opts).map_err(|e| e.to_string())?;
    ensure(sv == svetlichny_family(&Scalar::one()).unwrap(), || "Svetlichny preset does not give SvF(1)".into())?;
    let mf = snap_to_exact(&born_box(&ghz, &preset_settings(Preset::Mermin)), opts).map_err(|e| e.to_string())?;
    ensure(mf == mermin_family(&Scalar::one()).unwrap(), || "Mermin preset does not give MF(1)".into())?;
    let product = born_box(&gghz_state(0.0), &preset_settings(Preset::Svetlichny));
    let dev = product.max_abs_difference(&FloatBox::from_exact(&white_noise()));
    ensure(dev <= 1e-12, || format!("GGHZ(0) deviates from white noise by {dev:e}"))?;
    Ok(format!("GGHZ(pi/4) snaps to SvF(1) and MF(1); GGHZ(0) within {dev:.1e} of white noise"))
}

fn observation_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e_7a71);
    let mut nonzero_absolute = 0;
    for k in 0..50 {
        let cq = common::random_cq(&mut rng);
        let (fbox, witness) = nsbox::quantum::cq_box_with_witness(cq.p, &cq.bob, &cq.charlie, &cq.settings)
            .map_err(|e| format!("state {k}: {e}"))?;
        ensure(witness.alice_deterministic, || format!("state {k}: Alice is not in the classical basis"))?;
        let b = snap_to_exact(&fbox, common::CQ_SNAP).map_err(|e| format!("state {k}: {e}"))?;
        let exact = witness.snap(common::CQ_SNAP).map_err(|e| format!("state {k}: {e}"))?;
        ensure(exact.cut == Cut::A && exact.dimension() == 2, || format!("state {k}: witness shape"))?;
        ensure(exact.verify(&b), || format!("state {k}: witness does not reconstruct the box"))?;
        let rep = genuine_report(&b, 2);
        ensure(!rep.genuine, || format!("state {k}: reported genuinely superlocal"))?;
        ensure(rep.verdicts[0].status != Status::Superlocal, || format!("state {k}: A|BC superlocal"))?;
        if rep.absolute {
            nonzero_absolute += 1;
        }
    }
    Ok(format!("50 states: 2-term A|BC witnesses verified exactly, none genuine ({nonzero_absolute} absolute)"))
}

fn corpus() -> Vec<(String, TripartiteBox)> {
    let mut boxes = Vec::new();
    for k in [1, 3, 4, 8] {
        let p = r(k, 8);
        boxes.push((format!("SvF({p})"), svetlichny_family(&p).unwrap()));
        boxes.push((format!("MF({p})"), mermin_family(&p).unwrap()));
    }
    boxes.push(("white".into(), white_noise()));
    for l in ["D:011010", "T12:10110", "T13:00101", "T23:01101", "S:0110", "M:1110"] {
        let label: VertexLabel = l.parse().unwrap();
        boxes.push((l.into(), make_vertex(&label)));
    }
    let half = r(1, 2);
    let mixed = mix(
        &[make_vertex(&s_label("T23:01101")), make_vertex(&s_label("D:110010"))],
        &[half.clone(), half],
    )
    .unwrap();
    boxes.push(("T23/D mixture".into(), mixed));
    boxes
}

fn s_label(l: &str) -> VertexLabel {
    l.parse().unwrap()
}

fn properties() -> Outcome {
    // constructors: every family on a grid, every vertex label
    let grid: Vec<Scalar> = (1..=16).map(|k| r(k, 16)).chain([Scalar::inv_sqrt2(), s("1/4+1/4*sqrt2")]).collect();
    for p in &grid {
        for b in [svetlichny_family(p), mermin_family(p)] {
            let b = b.map_err(|e| format!("family at {p}: {e}"))?;
            ensure(b.validate().is_valid(), || format!("family box at {p} invalid"))?;
        }
        for b in [bb84_family(p), chsh_family(p)] {
            let b = b.map_err(|e| format!("bipartite family at {p}: {e}"))?;
            ensure(b.validate().is_valid(), || format!("bipartite family at {p} invalid"))?;
        }
    }
    let mut labels = polytope_vertices(2);
    labels.extend(VertexLabel::mermin_all());
    for l in &labels {
        let v = make_vertex(l);
        ensure(v.validate().is_valid(), || format!("vertex {l} invalid"))?;
        let back = from_correlators(&v.correlators()).map_err(|e| format!("{l}: {e}"))?;
        ensure(back == v, || format!("correlator round trip fails for {l}"))?;
    }

    // mutual exclusion: verdicts at every d on the corpus, panics caught
    let mut verdicts = 0;
    for (name, b) in corpus() {
        for d in 1..=4 {
            for cut in Cut::ALL {
                let v = catch_unwind(AssertUnwindSafe(|| superlocality_verdict(&b, cut, d)))
                    .map_err(|_| format!("exclusion assertion fired on {name}, {cut}, d={d}"))?;
                ensure(verify_verdict(&b, &v), || format!("{name} {cut} d={d}: verdict does not verify"))?;
                verdicts += 1;
            }
        }
    }

    for v in [r(1, 4), r(1, 2), Scalar::one()] {
        for (name, b) in [("BB84", bb84_family(&v).unwrap()), ("CHSH", chsh_family(&v).unwrap())] {
            let verdict = bipartite_verdict(&b, 2);
            ensure(verdict.status == Status::Superlocal, || format!("{name}({v}) is {:?} at d=2", verdict.status))?;
            ensure(verify_bipartite_verdict(&b, &verdict), || format!("{name}({v}) certificate fails"))?;
        }
    }
    Ok(format!(
        "{} family boxes valid; {} labels round-trip through correlators; {verdicts} verdicts without exclusion failures; BB84/CHSH superlocal at d=2",
        grid.len() * 4,
        labels.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("inequality exactness", inequality_exactness),
        ("strength reproduction", strength_reproduction),
        ("membership thresholds", membership_thresholds),
        ("genuine superlocality at d=2", theorems),
        ("appendix decompositions", appendix_fidelity),
        ("deterministic-Alice enumeration", appendix_b),
        ("quantum round trip", quantum_round_trip),
        ("classical-quantum consistency", observation_one),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
