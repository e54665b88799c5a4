//! Feature files, histogram files and curve outputs on disk.

use prcurve::curve::default_lambda_grid;
use prcurve::io::{self, CurveFormat, CurveMeta, CurveOutput, FeatureFormat};
use prcurve::measures::exact_pr_curve;
use prcurve::SampleSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("prcurve-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let set = SampleSet::from_rows(&[vec![0.5, 1.5], vec![-2.0, 4.0], vec![3.25, 0.0]])?
        .with_labels(vec![0, 1, 1])?;
    for (name, format) in [
        ("features.csv", FeatureFormat::Csv),
        ("features.prdf", FeatureFormat::Binary),
    ] {
        let path = dir.join(name);
        io::save_features(&set, &path, format)?;
        let back = io::load_features(&path)?;
        println!(
            "{name}: {} rows, {} columns, labels kept: {}",
            back.rows(),
            back.cols(),
            back.labels().is_some()
        );
    }

    let p_path = dir.join("p.csv");
    let q_path = dir.join("q.csv");
    std::fs::write(&p_path, "3\n1\n0\n")?;
    std::fs::write(&q_path, "1\n1\n2\n")?;
    let p = io::load_histogram(&p_path, true)?;
    let q = io::load_histogram(&q_path, true)?;

    let curve = exact_pr_curve(&p, &q, &default_lambda_grid(3)?.with_endpoints())?;
    let output = CurveOutput::from_curve(&curve, CurveMeta::new("exact"));
    let json = dir.join("curve.json");
    io::save_curve(&output, &json, CurveFormat::Json)?;
    println!("{}", output.to_csv()?);
    let reloaded = io::load_curve(&json)?;
    println!(
        "reloaded {} points, identical: {}",
        reloaded.len(),
        reloaded == curve
    );

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
