//! Line-oriented trajectory files.
//!
//! ```text
//! # swarmkit-trajectory v1
//! # params gamma=1 v=0.3 omega=1 phi_rad=0.6283185307179586 n=10
//! # sim dt=0.01 horizon=300 seed=7 record_stride=10
//! # samples 3001
//! 0 x0 y0 theta0 x1 y1 theta1 ...
//! ```
//!
//! Floats use Rust's shortest round-trip form (`{:?}`), so a write/read
//! cycle is bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::dynamics::Trajectory;
use crate::error::{Result, SwarmError};
use crate::params::{SimConfig, SwarmParams};
use crate::state::{AgentState, Microstate};

pub const MAGIC: &str = "swarmkit-trajectory";
pub const VERSION: u32 = 1;

fn header(traj: &Trajectory) -> String {
    let p = &traj.params;
    let c = &traj.config;
    format!(
        "# {MAGIC} v{VERSION}\n# params gamma={:?} v={:?} omega={:?} phi_rad={:?} n={}\n# sim dt={:?} horizon={:?} seed={} record_stride={}\n# samples {}\n",
        p.gamma(),
        p.v(),
        p.omega(),
        p.phi(),
        p.n(),
        c.dt(),
        c.horizon(),
        c.seed(),
        c.record_stride(),
        traj.samples.len()
    )
}

pub fn sample_line(s: &Microstate) -> String {
    let mut line = format!("{:?}", s.t);
    for a in &s.agents {
        write!(line, " {:?} {:?} {:?}", a.x, a.y, a.theta).expect("string write");
    }
    line.push('\n');
    line
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    out.write_all(header(traj).as_bytes())?;
    for s in &traj.samples {
        out.write_all(sample_line(s).as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_string(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_trajectory(traj, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii output")
}

fn fmt_err(line: usize, reason: impl Into<String>) -> SwarmError {
    SwarmError::TrajectoryFormat {
        line,
        reason: reason.into(),
    }
}

/// Parses `key=value` pairs after a `# <tag>` prefix.
fn fields<'a>(line: &'a str, tag: &str, lineno: usize, keys: &[&str]) -> Result<Vec<&'a str>> {
    let rest = line
        .strip_prefix("# ")
        .and_then(|l| l.strip_prefix(tag))
        .ok_or_else(|| fmt_err(lineno, format!("expected '# {tag} ...' header")))?;
    let pairs: Vec<&str> = rest.split_whitespace().collect();
    if pairs.len() != keys.len() {
        return Err(fmt_err(lineno, format!("expected {} fields in {tag} header", keys.len())));
    }
    pairs
        .iter()
        .zip(keys)
        .map(|(pair, key)| {
            pair.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .ok_or_else(|| fmt_err(lineno, format!("expected {key}=<value>, got {pair:?}")))
        })
        .collect()
}

fn num<T: std::str::FromStr>(s: &str, lineno: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| fmt_err(lineno, format!("bad {what}: {s:?}")))
}

pub fn read_trajectory<R: BufRead>(input: R) -> Result<Trajectory> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l)),
            Some((i, Err(e))) => Err(fmt_err(i, e.to_string())),
            None => Err(fmt_err(0, format!("file ends before {what}"))),
        }
    };

    let (i, magic) = next("format line")?;
    let version = magic
        .strip_prefix("# ")
        .and_then(|l| l.strip_prefix(MAGIC))
        .and_then(|l| l.trim().strip_prefix('v'))
        .ok_or_else(|| fmt_err(i, "not a swarmkit trajectory file"))?;
    let version: u32 = num(version, i, "version")?;
    if version != VERSION {
        return Err(fmt_err(i, format!("unsupported format version {version}, expected {VERSION}")));
    }

    let (i, l) = next("params header")?;
    let f = fields(&l, "params", i, &["gamma", "v", "omega", "phi_rad", "n"])?;
    let params = SwarmParams::new(
        num(f[0], i, "gamma")?,
        num(f[1], i, "v")?,
        num(f[2], i, "omega")?,
        num(f[3], i, "phi_rad")?,
        num(f[4], i, "n")?,
    )
    .map_err(|e| fmt_err(i, e.to_string()))?;

    let (i, l) = next("sim header")?;
    let f = fields(&l, "sim", i, &["dt", "horizon", "seed", "record_stride"])?;
    let config = SimConfig::new(
        num(f[0], i, "dt")?,
        num(f[1], i, "horizon")?,
        num(f[2], i, "seed")?,
        num(f[3], i, "record_stride")?,
    )
    .map_err(|e| fmt_err(i, e.to_string()))?;

    let (i, l) = next("samples header")?;
    let count: usize = num(
        l.strip_prefix("# samples ").ok_or_else(|| fmt_err(i, "expected '# samples <count>'"))?,
        i,
        "sample count",
    )?;

    let n = params.n();
    let mut samples = Vec::with_capacity(count);
    for k in 0..count {
        let (i, l) = next("all samples were read").map_err(|_| {
            fmt_err(0, format!("truncated: header announces {count} samples, found {k}"))
        })?;
        let vals: Vec<&str> = l.split_whitespace().collect();
        if vals.len() != 1 + 3 * n {
            return Err(fmt_err(i, format!("expected {} numbers, found {}", 1 + 3 * n, vals.len())));
        }
        let t: f64 = num(vals[0], i, "time")?;
        let agents = vals[1..]
            .chunks(3)
            .map(|c| {
                Ok(AgentState {
                    x: num(c[0], i, "x")?,
                    y: num(c[1], i, "y")?,
                    theta: num(c[2], i, "theta")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        samples.push(Microstate { agents, t });
    }
    if let Some((i, Ok(extra))) = lines.next() {
        if !extra.trim().is_empty() {
            return Err(fmt_err(i, format!("data beyond the announced {count} samples")));
        }
    }
    Ok(Trajectory {
        params,
        config,
        samples,
    })
}

pub fn save(traj: &Trajectory, path: &std::path::Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| SwarmError::Io(format!("{}: {e}", path.display())))?;
    write_trajectory(traj, std::io::BufWriter::new(f))
}

pub fn load(path: &std::path::Path) -> Result<Trajectory> {
    let f = std::fs::File::open(path).map_err(|e| SwarmError::Io(format!("{}: {e}", path.display())))?;
    read_trajectory(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::run;
    use crate::init::random_connected_init;

    fn sample_traj() -> Trajectory {
        let p = SwarmParams::with_phi_degrees(1.0, 0.3, 1.0, 50.0, 5).unwrap();
        let init = random_connected_init(&p, 1.0, 11).unwrap();
        run(&init, &p, &SimConfig::new(0.01, 2.0, 11, 7).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let t = sample_traj();
        let text = to_string(&t);
        let back = read_trajectory(text.as_bytes()).unwrap();
        assert_eq!(back.params, t.params);
        assert_eq!(back.config, t.config);
        assert_eq!(back.samples.len(), t.samples.len());
        for (a, b) in back.samples.iter().zip(&t.samples) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            for (x, y) in a.agents.iter().zip(&b.agents) {
                assert_eq!(x.x.to_bits(), y.x.to_bits());
                assert_eq!(x.y.to_bits(), y.y.to_bits());
                assert_eq!(x.theta.to_bits(), y.theta.to_bits());
            }
        }
        assert_eq!(to_string(&back), text);
    }

    #[test]
    fn truncation_is_detected() {
        let text = to_string(&sample_traj());
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        let e = read_trajectory(cut.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("truncated"), "{e}");
        // a partially written last line
        let partial = &text[..text.len() - 20];
        assert!(read_trajectory(partial.as_bytes()).is_err());
    }

    #[test]
    fn version_mismatch_is_detected() {
        let text = to_string(&sample_traj()).replacen("v1", "v2", 1);
        let e = read_trajectory(text.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("version 2"), "{e}");
        assert!(read_trajectory("hello\n".as_bytes()).is_err());
    }
}
