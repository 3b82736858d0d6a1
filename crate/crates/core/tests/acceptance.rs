//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use common::oracles::{knn_oracle, nb_oracle, random_dataset, split_oracle};
use common::{FUZZY_RF_BLOCK, HARD_GROUP, SOFT_GROUP, SOFT_GROUP_MEAN};
use rotvote::bench::{
    format_csv, highlight_best, highlighted_rows, parse_report, render_svg, run_grid, ResultRow, RunConfig,
    CSV_HEADER, REPORT_DECIMALS,
};
use rotvote::classifiers::{
    solve_binary_svm, split_gain, train, ClassifierSpec, ForestParams, Kernel, KnnParams, NbParams, Predictor,
    ProbDist,
};
use rotvote::datasets::{sample_sizes, write_synthetic_corpus, EvaluationProtocol, DEFAULT_FRACTIONS};
use rotvote::descriptors::{extract, DescriptorConfig, DescriptorKind};
use rotvote::imaging::{build_group, flip_horizontal, rotate, FillColor, RasterImage, GROUP_SIZE};
use rotvote::voting::{hard_vote, soft_vote, GroupPredictions, Tally};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn random_image(rng: &mut Xoshiro256PlusPlus, w: usize, h: usize) -> RasterImage {
    RasterImage::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()]).unwrap()
}

fn hard_vote_table() -> Check {
    let g = GroupPredictions::new("table", 1, 3, HARD_GROUP.to_vec(), None).map_err(|e| e.to_string())?;
    let v = hard_vote(&g);
    ensure!(v.winner == 1, "winner C{}", v.winner + 1);
    ensure!(v.tally == Tally::Counts(vec![3, 4, 1]), "tally {:?}", v.tally);
    Ok("winner C2, tally {3, 4, 1}".into())
}

fn soft_vote_table() -> Check {
    let dists = SOFT_GROUP.iter().map(|r| ProbDist::new(r.to_vec()).unwrap()).collect();
    let g = GroupPredictions::from_dists("table", 0, dists).map_err(|e| e.to_string())?;
    let v = soft_vote(&g).map_err(|e| e.to_string())?;
    ensure!(v.winner == 0, "winner C{}", v.winner + 1);
    let Tally::Mean(mean) = &v.tally else {
        return Err("not a mean tally".into());
    };
    let want = [0.48375, 0.2275, 0.28875];
    for ((m, w), hand) in mean.iter().zip(want).zip(SOFT_GROUP_MEAN) {
        ensure!((m - w).abs() <= 1e-12 && (m - hand).abs() <= 1e-12, "mean {mean:?}");
    }
    Ok(format!("winner C1, mean {mean:?}"))
}

fn sample_sweep() -> Check {
    for (n_min, want) in [(61, [61, 49, 31, 19]), (340, [340, 272, 170, 102]), (500, [500, 400, 250, 150])] {
        let got = sample_sizes(n_min, &DEFAULT_FRACTIONS);
        ensure!(got == want, "n_min {n_min}: {got:?}");
    }
    Ok("61/340/500 columns reproduced".into())
}

fn augmentation_contract() -> Check {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let n = 150;
    for i in 0..n {
        let (w, h) = if i % 2 == 0 {
            let s = rng.random_range(1..32);
            (s, s)
        } else {
            (rng.random_range(1..32), rng.random_range(1..32))
        };
        let img = random_image(&mut rng, w, h);
        let fill = FillColor([rng.random(), rng.random(), rng.random()]);
        let g = build_group(&img, "img", 0, fill);
        let v = g.variants();
        ensure!(v.len() == GROUP_SIZE, "{} variants", v.len());
        ensure!(v.iter().all(|x| (x.width(), x.height()) == (w, h)), "size changed for {w}x{h}");
        ensure!(v[0] == img, "slot 0 is not the original");
        for (k, angle) in [30.0, 60.0, 90.0].into_iter().enumerate() {
            ensure!(v[k + 1] == rotate(&img, angle, fill).unwrap(), "slot {} is not rot{angle}", k + 1);
        }
        for k in 0..4 {
            ensure!(v[k + 4] == flip_horizontal(&v[k]), "slot {} is not the mirror of {k}", k + 4);
        }
        if w == h {
            let mut r = img.clone();
            for _ in 0..4 {
                r = rotate(&r, 90.0, fill).unwrap();
            }
            ensure!(r == img, "four quarter turns changed a {w}x{w} image");
        }
    }
    Ok(format!("{n} random images, quarter-turn identity on {} squares", n / 2))
}

fn highlight_rule() -> Check {
    let rows: Vec<ResultRow> = FUZZY_RF_BLOCK
        .iter()
        .map(|&(samples, accuracy, soft_voting, hard_voting)| ResultRow {
            descriptor: "Fuzzy".into(),
            classifier: "RF".into(),
            samples,
            accuracy,
            soft_voting,
            hard_voting,
        })
        .collect();
    let h = highlight_best(&rows);
    ensure!(h.len() == 1 && h[0].samples == 19, "highlighted {h:?}");
    let best = rows.iter().map(ResultRow::improvement).fold(f64::MIN, f64::max);
    ensure!((best - 0.50).abs() < 1e-9, "best sum {best}");
    Ok("samples = 19, improvement sum 0.50".into())
}

fn classifier_oracles() -> Check {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(77);
    let knn = ClassifierSpec::Knn(KnnParams::default());
    for case in 0..200 {
        let n = rng.random_range(3..25);
        let c = rng.random_range(2..4);
        let data = random_dataset(&mut rng, n, 2, c);
        let m = train(&knn, &data).map_err(|e| e.to_string())?;
        let q: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..2.5)).collect();
        let want = knn_oracle(data.features(), data.labels(), c, 5, &q);
        let got = m.predict_proba(&q).map_err(|e| e.to_string())?;
        let ok = got.probs().iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12);
        ensure!(ok, "5NN instance {case}: {got:?} vs {want:?}");
    }

    let nb = ClassifierSpec::NaiveBayes(NbParams::default());
    for case in 0..50 {
        let data = random_dataset(&mut rng, 30, 3, 3);
        let m = train(&nb, &data).map_err(|e| e.to_string())?;
        let q: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..2.0)).collect();
        let want = nb_oracle(&data, 1e-9, &q);
        let got = m.predict_proba(&q).map_err(|e| e.to_string())?;
        let ok = got.probs().iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9);
        ensure!(ok, "NB instance {case}: {got:?} vs {want:?}");
    }

    for case in 0..200 {
        let n = rng.random_range(2..30);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let got = split_gain(&values, &labels).map_err(|e| e.to_string())?;
        match (got, split_oracle(&values, &labels)) {
            (None, None) => {}
            (Some(g), Some((t, ratio))) => {
                ensure!(g.threshold == t && (g.gain_ratio - ratio).abs() < 1e-9, "split case {case}: {values:?} {labels:?} got {g:?} want {t} {ratio}");
            }
            other => return Err(format!("split case {case}: {other:?}")),
        }
    }

    for (a, b) in [(0.0, 2.0), (-3.0, 5.0), (1.0, 1.5), (10.0, -4.0)] {
        let pts = vec![vec![a], vec![b]];
        let y = vec![-1.0, 1.0];
        let sol = solve_binary_svm(&pts, &y, 1000.0, 1e-3, &Kernel::Linear).map_err(|e| e.to_string())?;
        let f = |x: f64| sol.decision(&pts, &y, &Kernel::Linear, &[x]);
        let mid = (a + b) / 2.0;
        let scale = (b - a).abs();
        ensure!(f(mid).abs() < 1e-3, "two points {a},{b}: f(mid) = {}", f(mid));
        ensure!(f(mid + 0.01 * (b - a)) > 0.0 && f(mid - 0.01 * (b - a)) < 0.0, "orientation at {a},{b}");
        // The zero crossing lies within 1e-3 of the midpoint.
        let slope = (f(b) - f(a)) / (b - a);
        ensure!((f(mid) / slope).abs() < 1e-3 * scale.max(1.0), "boundary offset at {a},{b}");
    }

    let tol = 1e-3;
    for case in 0..100 {
        let n = rng.random_range(4..40);
        let d = rng.random_range(1..4);
        let c = rng.random_range(0.1..50.0);
        let y: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let pts: Vec<Vec<f64>> = y
            .iter()
            .map(|&yi| (0..d).map(|_| yi * 1.5 + rng.random_range(-1.0..1.0)).collect())
            .collect();
        let kernel = if case % 2 == 0 { Kernel::Linear } else { Kernel::Rbf { gamma: 0.5 } };
        let sol = solve_binary_svm(&pts, &y, c, tol, &kernel).map_err(|e| e.to_string())?;
        ensure!(sol.alphas.iter().all(|&a| (0.0..=c).contains(&a)), "SMO case {case}: alpha outside [0, C]");
        let balance: f64 = sol.alphas.iter().zip(&y).map(|(a, y)| a * y).sum();
        ensure!(balance.abs() <= tol, "SMO case {case}: sum alpha*y = {balance}");
    }
    Ok("5NN x200, NB x50, split x200, SMO two-point x4, SMO feasibility x100".into())
}

fn descriptor_properties() -> Check {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(31);
    let mut checked = 0;
    for levels in [1, 2, 4] {
        for grid in [1, 2, 4] {
            for bins in [1, 3, 8] {
                for plevels in [0, 1, 2] {
                    let mut cfg = DescriptorConfig::default();
                    cfg.autocolor.levels_per_channel = levels;
                    cfg.autocolor.distances = vec![1, 3];
                    cfg.edge.grid = grid;
                    cfg.edge.orientation_bins = bins;
                    cfg.fuzzy.bins_per_axis = levels + 1;
                    cfg.phog.orientation_bins = bins;
                    cfg.phog.pyramid_levels = plevels;
                    let want = [
                        levels.pow(3) * 2,
                        grid * grid * bins,
                        (levels + 1).pow(3),
                        bins * (0..=plevels).map(|l| 4usize.pow(l as u32)).sum::<usize>(),
                    ];
                    let (w, h) = (rng.random_range(1..24), rng.random_range(1..24));
                    let img = random_image(&mut rng, w, h);
                    let solid = RasterImage::filled(w.max(8), h.max(8), [rng.random(), rng.random(), rng.random()]).unwrap();
                    for (kind, dim) in DescriptorKind::ALL.into_iter().zip(want) {
                        ensure!(cfg.dimension(kind) == dim, "{kind} dimension {} != {dim}", cfg.dimension(kind));
                        let f = extract(kind, &img, &cfg);
                        ensure!(f.len() == dim, "{kind} emitted {} values", f.len());
                        let s: f64 = f.values().iter().sum();
                        if kind.is_histogram() {
                            ensure!(s == 0.0 || (s - 1.0).abs() <= 1e-9, "{kind} sums to {s}");
                        } else {
                            ensure!(f.values().iter().all(|v| (0.0..=1.0).contains(v)), "{kind} outside [0, 1]");
                        }
                        let fs = extract(kind, &solid, &cfg);
                        match kind {
                            DescriptorKind::AutoColor => {
                                let nonzero: Vec<f64> = fs.values().iter().copied().filter(|&v| v != 0.0).collect();
                                ensure!(
                                    !nonzero.is_empty() && nonzero.iter().all(|&v| v == 1.0),
                                    "solid AutoColor {:?}",
                                    fs.values()
                                );
                            }
                            DescriptorKind::Edge | DescriptorKind::Phog => {
                                ensure!(fs.values().iter().all(|&v| v == 0.0), "{kind} non-zero on a solid image");
                            }
                            DescriptorKind::Fuzzy => {}
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} descriptor/config combinations"))
}

fn trend_check() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut gains = Vec::new();
    let mut failures = Vec::new();
    for seed in [1u64, 2, 3] {
        let root = tmp.path().join(format!("corpus{seed}"));
        write_synthetic_corpus(&root, 100, 48, seed).map_err(|e| e.to_string())?;
        let cfg = RunConfig {
            corpus: root,
            seed,
            descriptors: vec![DescriptorKind::Edge, DescriptorKind::Phog],
            classifiers: vec![ClassifierSpec::RandomForest(ForestParams::default())],
            fractions: vec![1.0],
            protocol: EvaluationProtocol::holdout(0.3),
            audit: false,
            ..RunConfig::default()
        };
        let out = run_grid(&cfg).map_err(|e| e.to_string())?;
        ensure!(out.is_complete(), "seed {seed}: {:?}", out.failures);
        for r in &out.rows {
            lines.push(format!(
                "seed {seed} {}: acc {:.4} soft {:.4} hard {:.4}",
                r.descriptor, r.accuracy, r.soft_voting, r.hard_voting
            ));
            gains.push(r.hard_voting - r.accuracy);
            if r.hard_voting < r.accuracy || r.soft_voting < r.accuracy - 0.02 {
                failures.push(lines.last().unwrap().clone());
            }
        }
    }
    for l in &lines {
        println!("    {l}");
    }
    let mean = gains.iter().sum::<f64>() / gains.len() as f64;
    println!("    mean hard-vote improvement {mean:.4} (informational, {} 0.05)", if mean >= 0.05 { ">=" } else { "<" });
    ensure!(failures.is_empty(), "below baseline: {}", failures.join("; "));
    Ok(format!("Edge and PHOG with RF over 3 seeds, mean hard gain {mean:.4}"))
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_synthetic_corpus(tmp.path(), 20, 32, 5).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for jobs in [1, 4, 1] {
        let cfg = RunConfig {
            corpus: tmp.path().into(),
            jobs,
            seed: 17,
            audit: false,
            ..RunConfig::default()
        };
        let out = run_grid(&cfg).map_err(|e| e.to_string())?;
        ensure!(out.is_complete(), "failures at jobs {jobs}: {:?}", out.failures);
        ensure!(out.rows.len() == 80, "{} rows", out.rows.len());
        reports.push(format_csv(&out.rows, REPORT_DECIMALS));
    }
    ensure!(reports[0] == reports[1], "jobs 1 and 4 differ");
    ensure!(reports[0] == reports[2], "repeated run differs");
    Ok("80-cell grid byte-identical at jobs 1, 4, 1".into())
}

fn report_formats() -> Check {
    let mut rows = Vec::new();
    for (d, desc) in ["AutoColor", "Edge", "Fuzzy", "PHOG"].into_iter().enumerate() {
        for (c, clf) in ["5NN", "J48", "NB", "RF", "SMO"].into_iter().enumerate() {
            for (s, samples) in [19, 31, 49, 61].into_iter().enumerate() {
                let v = |m: usize| ((d * 31 + c * 7 + s * 3) * m % 101) as f64 / 100.0;
                rows.push(ResultRow {
                    descriptor: desc.into(),
                    classifier: clf.into(),
                    samples,
                    accuracy: v(3),
                    soft_voting: v(5),
                    hard_voting: v(11),
                });
            }
        }
    }
    let csv = format_csv(&rows, REPORT_DECIMALS);
    let lines: Vec<&str> = csv.lines().collect();
    ensure!(lines.len() == 81, "{} lines", lines.len());
    ensure!(
        lines[0] == "descriptor,classifier,samples,accuracy,soft_voting,hard_voting,highlighted" && lines[0] == CSV_HEADER,
        "header {}",
        lines[0]
    );
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        let four = f[3..6].iter().all(|m| m.split_once('.').is_some_and(|(_, frac)| frac.len() == 4));
        ensure!(f.len() == 7 && four, "bad line {l}");
    }
    let parsed = parse_report(&csv).map_err(|e| e.to_string())?;
    ensure!(parsed.iter().filter(|p| p.highlighted).count() == 20, "highlight count");

    let best = highlighted_rows(&rows);
    let svg = render_svg(&best).map_err(|e| e.to_string())?;
    let doc = roxmltree::Document::parse(&svg).map_err(|e| e.to_string())?;
    ensure!(doc.root_element().has_tag_name("svg"), "root element");
    let rects = doc.descendants().filter(|n| n.has_tag_name("rect")).count();
    ensure!(rects == 3 * best.len(), "{rects} rects for {} groups", best.len());
    Ok(format!("81-line CSV, {rects} bars for {} groups", best.len()))
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 10] = [
        ("hard-vote reproduction", hard_vote_table),
        ("soft-vote reproduction", soft_vote_table),
        ("sample-sweep reproduction", sample_sweep),
        ("augmentation contract", augmentation_contract),
        ("highlight rule", highlight_rule),
        ("classifier oracles", classifier_oracles),
        ("descriptor properties", descriptor_properties),
        ("end-to-end trend", trend_check),
        ("determinism", determinism),
        ("report/plot formats", report_formats),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
