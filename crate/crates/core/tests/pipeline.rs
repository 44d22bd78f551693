//! End-to-end runs: generate, group, report, render, and the stimulus
//! file format along the way.

mod common;

use segeo::pipeline::format_report;
use segeo::spectral::eigen_decomposition;
use segeo::stimuli::{gen_curve_line, gen_kanizsa_triangle, CurveLineConfig, KanizsaConfig};
use segeo::{group, parse_stimulus, render_svg, serialize_stimulus, ExtractConfig, KernelCache, KernelParams, RenderSpec};

#[test]
fn triangle_runs_end_to_end_deterministically() {
    let s = gen_kanizsa_triangle(&KanizsaConfig::default()).unwrap();
    let template = KernelParams::fokker_planck(1);
    let extract = ExtractConfig::default();
    let a = group(&s, &template, true, &extract, common::cache()).unwrap();
    let b = group(&s, &template, true, &extract, common::cache()).unwrap();
    assert_eq!(format_report(&a, 5), format_report(&b, 5));
    assert!(!a.units.is_empty());

    let svg = render_svg(&s, &a.units, &RenderSpec::default()).unwrap();
    assert_eq!(svg, render_svg(&s, &b.units, &RenderSpec::default()).unwrap());
    assert_eq!(svg.matches("<line").count(), s.len());
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn a_fresh_cache_reuses_kernels_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen_kanizsa_triangle(&KanizsaConfig::default()).unwrap();
    let template = KernelParams::fokker_planck(1).with_paths(50_000);
    let extract = ExtractConfig::default();
    let first = group(&s, &template, true, &extract, &KernelCache::new(Some(dir.path().into()))).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = group(&s, &template, true, &extract, &KernelCache::new(Some(dir.path().into()))).unwrap();
    assert_eq!(first.affinity, second.affinity);
    assert_eq!(format_report(&first, 3), format_report(&second, 3));
}

#[test]
fn generated_stimuli_survive_the_text_format() {
    let s = gen_curve_line(&CurveLineConfig {
        n_background: 20,
        ..CurveLineConfig::default()
    })
    .unwrap();
    let back = parse_stimulus(&serialize_stimulus(&s)).unwrap();
    assert_eq!(back.len(), s.len());
    assert_eq!(back.labels(), s.labels());
    assert_eq!(back.mode(), s.mode());
    for (p, q) in s.elements().iter().zip(back.elements()) {
        assert!((p.x - q.x).abs() < 1e-9 && (p.y - q.y).abs() < 1e-9 && (p.theta - q.theta).abs() < 1e-9);
    }
    assert_eq!(serialize_stimulus(&back), serialize_stimulus(&s));
}

#[test]
fn full_spectrum_agrees_with_jacobi() {
    let s = gen_curve_line(&CurveLineConfig::default()).unwrap();
    let grid = common::cache()
        .get(&KernelParams::fokker_planck(segeo::auto_steps(&s)).with_paths(200_000))
        .unwrap();
    let a = segeo::build_affinity(&s, &grid).unwrap();
    let n = a.n();
    let ours = eigen_decomposition(&a).unwrap();
    let oracle = common::jacobi_eigen(a.values(), n);
    let scale = oracle[0].0.abs().max(1e-300);
    for (k, (value, vector)) in oracle.iter().enumerate() {
        assert!((ours.eigenvalues[k] - value).abs() <= 1e-9 * scale, "eigenvalue {k}");
        // vectors are only defined up to sign, and up to rotation inside a
        // cluster of equal eigenvalues
        let isolated = oracle
            .iter()
            .enumerate()
            .all(|(j, (w, _))| j == k || (w - value).abs() > 1e-6 * scale);
        if isolated {
            assert!(common::abs_cosine(&ours.eigenvectors[k], vector) > 1.0 - 1e-6, "eigenvector {k}");
        }
    }
}
