//! Text trajectory format: `# key value` header lines (every configuration
//! field, the generator name, and any caller supplied metadata), a column row,
//! then one CSV row `t,F,E_total,E_kinetic,q_1..q_N,p_1..p_N` per sample.

use std::io::Write;

use crate::ensemble::system::{parse_err, parse_real};
use crate::error::Result;
use crate::md::{PhaseState, Sample, SimConfig, Trajectory, GENERATOR_NAME};
use crate::scalar::Real;

pub fn write_trajectory<T: Real, W: Write>(
    traj: &Trajectory<T>,
    metadata: &[(String, String)],
    mut out: W,
) -> std::io::Result<()> {
    for (key, value) in metadata {
        writeln!(out, "# {key} {value}")?;
    }
    for (key, value) in traj.config.to_key_values() {
        writeln!(out, "# {key} {value}")?;
    }
    writeln!(out, "# generator {GENERATOR_NAME}")?;
    writeln!(out, "# scalar {}", T::NAME)?;
    let n = traj.config.n_particles;
    let mut columns = vec!["t".to_string(), "F".into(), "E_total".into(), "E_kinetic".into()];
    columns.extend((1..=n).map(|i| format!("q_{i}")));
    columns.extend((1..=n).map(|i| format!("p_{i}")));
    writeln!(out, "{}", columns.join(","))?;
    let mut line = String::new();
    for s in &traj.samples {
        line.clear();
        use std::fmt::Write as _;
        let _ = write!(line, "{},{},{},{}", s.t, s.right, s.total_energy, s.kinetic_energy);
        for x in s.state.q.iter().chain(&s.state.p) {
            let _ = write!(line, ",{x}");
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parses a trajectory file. Header keys that are not configuration fields
/// (generator, provenance) are ignored.
pub fn read_trajectory<T: Real>(text: &str) -> Result<Trajectory<T>> {
    let mut cfg = SimConfig::<T>::default();
    let mut samples = Vec::new();
    let mut seen_columns = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('#') {
            if seen_columns {
                continue;
            }
            let mut parts = header.trim().splitn(2, char::is_whitespace);
            if let (Some(key), Some(value)) = (parts.next(), parts.next()) {
                cfg.set(key, value.trim())
                    .map_err(|msg| parse_err(line, format!("{key}: {msg}")))?;
            }
            continue;
        }
        let n = cfg.n_particles;
        let width = 4 + 2 * n;
        if !seen_columns {
            cfg.validate().map_err(|e| parse_err(line, e.to_string()))?;
            let fields = content.split(',').count();
            if !content.starts_with("t,") || fields != width {
                return Err(parse_err(
                    line,
                    format!("expected a {width}-column header row starting with `t,`"),
                ));
            }
            seen_columns = true;
            continue;
        }
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(parse_err(line, format!("expected {width} fields, found {}", fields.len())));
        }
        let right = fields[1]
            .parse::<usize>()
            .ok()
            .filter(|&f| f <= n)
            .ok_or_else(|| parse_err(line, format!("F = `{}` is not an integer in [0, {n}]", fields[1])))?;
        let values = fields
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, tok)| parse_real::<T>(line, tok))
            .collect::<Result<Vec<T>>>()?;
        let t = values[0];
        if let Some(prev) = samples.last().map(|s: &Sample<T>| s.t) {
            if !(t > prev) {
                return Err(parse_err(line, "sample times must increase strictly"));
            }
        }
        let q = values[3..3 + n].to_vec();
        let p = values[3 + n..3 + 2 * n].to_vec();
        samples.push(Sample {
            t,
            state: PhaseState { q, p, t },
            right,
            total_energy: values[1],
            kinetic_energy: values[2],
        });
    }
    if !seen_columns {
        return Err(parse_err(text.lines().count().max(1), "missing column header row"));
    }
    Ok(Trajectory { config: cfg, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::md::run;

    #[test]
    fn write_then_read_is_lossless() {
        let cfg = SimConfig::<f64> {
            n_particles: 3,
            lj_sigma: 0.5,
            n_steps: 300,
            sample_stride: 100,
            seed: 5,
            ..SimConfig::default()
        };
        let traj = run(&cfg).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&traj, &[("tool".into(), "test".into())], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# generator ChaCha8Rng"));
        assert!(text.contains("\nt,F,E_total,E_kinetic,q_1,q_2,q_3,p_1,p_2,p_3\n"));
        let back: Trajectory<f64> = read_trajectory(&text).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn malformed_rows_are_located() {
        let text = "# n_particles 1\nt,F,E_total,E_kinetic,q_1,p_1\n0,0,1,1,-3,1\n0.1,2,1,1,-3,1\n";
        assert!(matches!(read_trajectory::<f64>(text), Err(Error::Parse { line: 4, .. })));
        let text = "# n_particles 1\nt,F,E_total,E_kinetic,q_1,p_1\n0,0,1,1,-3\n";
        assert!(matches!(read_trajectory::<f64>(text), Err(Error::Parse { line: 3, .. })));
        let text = "# n_particles 1\nt,F,E_total,E_kinetic,q_1,p_1\n0,0,1,1,-3,1\n0,0,1,1,-3,1\n";
        assert!(matches!(read_trajectory::<f64>(text), Err(Error::Parse { line: 4, .. })));
    }
}
