//! CSV tables. Each file starts with a `# swarmkit-<kind> v<version>` line
//! followed by a frozen column header.

use std::fmt::Write as _;

use crate::classify::Macrostate;
use crate::metrics::MetricSample;
use crate::mill::DeploySet;
use crate::sweep::{BoundaryPoint, PhaseDiagram, RadiusPoint, TrialLabel};

pub const METRICS_HEADER: &str = "# swarmkit-metrics v1\nt,v_bar,omega_bar,l_bar,scatter,radial_variance,circliness,r_max,r_min,swarm_radius\n";
pub const DEPLOY_HEADER: &str = "# swarmkit-deploy v1\nn,v,omega,gamma,phi_rad,r_star\n";
pub const PHASE_HEADER: &str = "# swarmkit-phase-diagram v1\nix,iy,gamma,v,omega,phi_rad,n,label,count_S,count_C,count_P,count_M,count_E,count_U,count_failed,mean_mill_radius,mean_tail_circliness,reference_radius\n";
pub const RADIUS_HEADER: &str = "# swarmkit-radius-study v1\nn,label,mill_fraction,measured_radius,predicted_radius\n";
pub const BOUNDARY_HEADER: &str = "# swarmkit-boundary-study v1\nturning_radius,mill_radius,ratio,label,m_fraction,labels\n";

/// Letter for a trial label; failed runs print as `X`.
pub fn label_str(l: TrialLabel) -> char {
    l.map_or('X', Macrostate::letter)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

pub fn metrics_csv(series: &[MetricSample]) -> String {
    let mut s = String::from(METRICS_HEADER);
    for m in series {
        writeln!(
            s,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            m.t, m.v_bar, m.omega_bar, m.l_bar, m.scatter, m.radial_variance, m.circliness, m.r_max, m.r_min, m.swarm_radius
        )
        .expect("string write");
    }
    s
}

pub fn deploy_csv(set: &DeploySet) -> String {
    let mut s = String::from(DEPLOY_HEADER);
    for d in &set.samples {
        writeln!(s, "{},{:?},{:?},{:?},{:?},{:?}", d.n, d.v, d.omega, d.gamma, d.phi, set.r_star).expect("string write");
    }
    s
}

/// One row per cell, row-major. The `reference_radius` column is reserved
/// for a competing radius model and left empty.
pub fn phase_csv(d: &PhaseDiagram) -> String {
    let mut s = String::from(PHASE_HEADER);
    for c in &d.cells {
        let p = &c.params;
        write!(
            s,
            "{},{},{:?},{:?},{:?},{:?},{},{}",
            c.ix,
            c.iy,
            p.gamma(),
            p.v(),
            p.omega(),
            p.phi(),
            p.n(),
            label_str(c.label)
        )
        .expect("string write");
        for k in c.label_counts {
            write!(s, ",{k}").expect("string write");
        }
        writeln!(s, ",{},{},{},", c.failed, opt(c.mean_mill_radius), opt(c.mean_tail_circliness)).expect("string write");
    }
    s
}

pub fn radius_csv(points: &[RadiusPoint]) -> String {
    let mut s = String::from(RADIUS_HEADER);
    for p in points {
        writeln!(
            s,
            "{},{},{:?},{},{}",
            p.n,
            label_str(p.label),
            p.mill_fraction,
            opt(p.measured),
            opt(p.predicted)
        )
        .expect("string write");
    }
    s
}

pub fn boundary_csv(points: &[BoundaryPoint]) -> String {
    let mut s = String::from(BOUNDARY_HEADER);
    for p in points {
        let labels: String = p.trial_labels.iter().map(|&l| label_str(l)).collect();
        writeln!(
            s,
            "{:?},{:?},{:?},{},{:?},{}",
            p.turning_radius,
            p.mill_radius,
            p.turning_radius / p.mill_radius,
            label_str(p.label),
            p.m_fraction,
            labels
        )
        .expect("string write");
    }
    s
}
