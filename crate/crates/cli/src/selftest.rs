//! Built-in smoke checks run by the `selftest` verb.

use std::path::Path;

use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use semidiscrete::{Ambient, Vec4};

use crate::config::{JobConfig, NetConfig};
use crate::job::{run_job, Verb};
use crate::mesh::{parse_obj, parse_ply};
use crate::projection::{project_ambient, HOLLOW_INNER, HOLLOW_OUTER};

/// The minimal Enneper-type family `g = k + it` with three parallel offsets.
pub fn enneper_family_config(out_dir: &Path) -> JobConfig {
    let text = r#"
[grid]
k_min = -5
k_max = 5
t_min = -1.5
t_max = 1.5
h = 0.01

[net]
kind = "linear"
a = 1.0
b = 1.0

[family]
kind = "minmax"
epsilon = 1
theta = [0.0, 0.3, 0.6]

[output]
name = "enneper"
"#;
    let mut cfg = JobConfig::from_toml(text).expect("built-in config parses");
    cfg.output.dir = out_dir.to_path_buf();
    cfg
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Counts projection invariant violations over `n` random points per model.
pub fn projection_violations(n: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h3 = 0;
    let mut s21 = 0;
    for _ in 0..n {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-20.0..20.0));
        let r2 = v.iter().map(|c| c * c).sum::<f64>();
        let p = Vec4::new(v[0], v[1], v[2], (1.0 + r2).sqrt());
        match project_ambient(&p, Ambient::H3, 1e-6) {
            Ok(img) if img.iter().map(|c| c * c).sum::<f64>() < 1.0 => {}
            _ => h3 += 1,
        }
        // De Sitter point with |z|² = 1 + z0².
        let z0: f64 = rng.random_range(-50.0..50.0);
        let dir: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-12);
        let scale = (1.0 + z0 * z0).sqrt() / norm;
        let q = Vec4::new(dir[0] * scale, dir[1] * scale, dir[2] * scale, z0);
        match project_ambient(&q, Ambient::S21, 1e-6) {
            Ok(img) => {
                let r = img.iter().map(|c| c * c).sum::<f64>().sqrt();
                if !(r > HOLLOW_INNER && r < HOLLOW_OUTER) {
                    s21 += 1;
                }
            }
            Err(_) => s21 += 1,
        }
    }
    (h3, s21)
}

pub fn run_selftest(out_dir: &Path) -> Vec<Check> {
    let mut checks = Vec::new();
    let (h3, s21) = projection_violations(10_000, 7);
    checks.push(Check {
        name: "projection invariants",
        pass: h3 == 0 && s21 == 0,
        detail: format!("{h3} H3 and {s21} hollow-ball violations in 10000 samples each"),
    });

    let cfg = enneper_family_config(out_dir);
    match run_job(&cfg, Verb::Parallel) {
        Ok(outcome) => {
            let mut parsed = 0;
            let mut errors = Vec::new();
            for p in &outcome.artifacts {
                let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
                let text = std::fs::read_to_string(p).unwrap_or_default();
                let r = match ext {
                    "obj" => Some(parse_obj(&text)),
                    "ply" => Some(parse_ply(&text)),
                    _ => None,
                };
                match r {
                    Some(Ok(_)) => parsed += 1,
                    Some(Err(e)) => errors.push(format!("{}: {e}", p.display())),
                    None => {}
                }
            }
            checks.push(Check {
                name: "parallel family job",
                pass: errors.is_empty() && parsed == 6,
                detail: format!("{} artifacts, {parsed} meshes parsed {errors:?}", outcome.artifacts.len()),
            });
        }
        Err(e) => checks.push(Check { name: "parallel family job", pass: false, detail: e.to_string() }),
    }

    let mut bad = enneper_family_config(out_dir);
    bad.net = NetConfig::Linear { a: 1.0, b: 1.0 };
    bad.family.kind = crate::config::FamilyKind::Bilw;
    bad.family.epsilon = None;
    bad.family.s = Some(0.5);
    bad.family.lambda = Some(1.0);
    let code = run_job(&bad, Verb::Analyze).err().map(|e| e.exit_code());
    checks.push(Check {
        name: "validation rejects 1 − λσ = 0",
        pass: code == Some(2),
        detail: format!("exit code {code:?}"),
    });
    checks
}
