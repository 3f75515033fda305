//! Parameter sweeps along the dissipative trajectory, sudden-birth detection
//! and the Figure 1 data set.

mod birth;
mod figure1;

use std::fmt::Write as _;
use std::path::PathBuf;

pub use birth::{detect_birth_time, first_crossing, BIRTH_THRESHOLD, REFINE_TOL};
pub use figure1::{
    family_series, figure1_dataset, figure1_p_values, Figure1Summary, Measure, SummaryRow,
    FIGURE1_K, FIGURE1_SAMPLES, FIGURE1_TAU_MAX,
};

use crate::correlations::CorrelationReport;
use crate::dynamics::{evolve_numeric, evolve_reduced_family, uniform_grid, SystemParams};
use crate::filtering::hidden_measures;
use crate::io::{fmt_f64, parse_key_value};
use crate::qstate::{make_x_state, werner_state, TwoQubitDensityMatrix, XParams};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    /// Closed-form reduced dynamics from the Werner family.
    AnalyticFamily,
    /// RK4 integration of the full master equation.
    Numeric {
        omega1: f64,
        omega2: f64,
        v: f64,
        step: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub p_values: Vec<f64>,
    pub k: f64,
    pub tau_max: f64,
    pub samples: usize,
    pub mode: Mode,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            p_values: vec![0.0],
            k: FIGURE1_K,
            tau_max: FIGURE1_TAU_MAX,
            samples: FIGURE1_SAMPLES,
            mode: Mode::AnalyticFamily,
            output_path: None,
            seed: 0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("{key}: cannot parse {v:?}")))
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() {
            return Err(Error::validation("p_values is empty"));
        }
        if let Some(p) = self.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::validation(format!("p = {p} outside [0, 1]")));
        }
        if self.samples < 2 {
            return Err(Error::validation("samples must be at least 2"));
        }
        if !(self.tau_max > 0.0) || !self.tau_max.is_finite() {
            return Err(Error::validation(format!(
                "tau_max must be positive, got {}",
                self.tau_max
            )));
        }
        match self.mode {
            Mode::AnalyticFamily => {
                if !(self.k > 0.0 && self.k < 1.0) {
                    return Err(Error::validation(format!(
                        "analytic-family mode needs k in (0, 1), got {}",
                        self.k
                    )));
                }
            }
            Mode::Numeric {
                omega1,
                omega2,
                v,
                step,
            } => {
                SystemParams::new(omega1, omega2, v, self.k)?;
                if !(step > 0.0) || !step.is_finite() {
                    return Err(Error::validation(format!(
                        "step must be positive, got {step}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Applies `key=value` settings on top of `self`. Numeric-mode keys
    /// (`omega1`, `omega2`, `V`, `step`) switch the mode to numeric.
    pub fn apply_key_value(&mut self, text: &str) -> Result<()> {
        for (key, v) in parse_key_value(text)? {
            self.set(&key, &v)?;
        }
        Ok(())
    }

    pub fn from_key_value(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_key_value(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn numeric_mut(&mut self) -> (&mut f64, &mut f64, &mut f64, &mut f64) {
        if self.mode == Mode::AnalyticFamily {
            self.mode = Mode::Numeric {
                omega1: 0.0,
                omega2: 0.0,
                v: 0.0,
                step: crate::dynamics::DEFAULT_STEP,
            };
        }
        match &mut self.mode {
            Mode::Numeric {
                omega1,
                omega2,
                v,
                step,
            } => (omega1, omega2, v, step),
            Mode::AnalyticFamily => unreachable!(),
        }
    }

    /// Sets one configuration key.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "p_values" => {
                self.p_values = v
                    .split(',')
                    .map(|x| parse_num::<f64>(key, x.trim()))
                    .collect::<Result<_>>()?
            }
            "k" => self.k = parse_num(key, v)?,
            "tau_max" => self.tau_max = parse_num(key, v)?,
            "samples" => self.samples = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "output_path" => self.output_path = Some(PathBuf::from(v)),
            "mode" => match v {
                "analytic-family" => self.mode = Mode::AnalyticFamily,
                "numeric" => {
                    self.numeric_mut();
                }
                other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
            },
            "omega1" => *self.numeric_mut().0 = parse_num(key, v)?,
            "omega2" => *self.numeric_mut().1 = parse_num(key, v)?,
            "V" => *self.numeric_mut().2 = parse_num(key, v)?,
            "step" => *self.numeric_mut().3 = parse_num(key, v)?,
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }
}

/// CSV column names, in order.
pub const CSV_HEADER: [&str; 21] = [
    "tau", "p", "k", "a", "b", "c", "d", "z_re", "z_im", "C", "B", "BF3", "D", "HB", "HBF3", "HD",
    "MEC", "nu0", "nu1", "nu2", "nu3",
];

/// One grid point of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub tau: f64,
    pub p: f64,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub concurrence: f64,
    pub chsh: f64,
    pub bf3: f64,
    pub teleport: f64,
    pub hb: f64,
    pub hbf3: f64,
    pub hd: f64,
    pub mec: f64,
    pub nu: [f64; 4],
}

impl TrajectoryRecord {
    pub fn values(&self) -> [f64; 21] {
        [
            self.tau,
            self.p,
            self.k,
            self.a,
            self.b,
            self.c,
            self.d,
            self.z_re,
            self.z_im,
            self.concurrence,
            self.chsh,
            self.bf3,
            self.teleport,
            self.hb,
            self.hbf3,
            self.hd,
            self.mec,
            self.nu[0],
            self.nu[1],
            self.nu[2],
            self.nu[3],
        ]
    }

    /// Value of a named column.
    pub fn get(&self, column: &str) -> Option<f64> {
        CSV_HEADER
            .iter()
            .position(|c| *c == column)
            .map(|i| self.values()[i])
    }

    pub fn evaluate(tau: f64, p: f64, k: f64, rho: &TwoQubitDensityMatrix) -> Result<Self> {
        let x = rho.x_params();
        let std = CorrelationReport::of(rho);
        let hid = hidden_measures(rho)?;
        let rec = Self {
            tau,
            p,
            k,
            a: x.a,
            b: x.b,
            c: x.c,
            d: x.d,
            z_re: x.z.re,
            z_im: x.z.im,
            concurrence: std.c,
            chsh: std.b,
            bf3: std.bf3,
            teleport: std.d,
            hb: hid.hb,
            hbf3: hid.hbf3,
            hd: hid.hd,
            mec: hid.mec,
            nu: hid.nu.to_array(),
        };
        if rec.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite value in record".into()));
        }
        Ok(rec)
    }
}

fn trajectory_for(p: f64, cfg: &ScanConfig, grid: &[f64]) -> Result<Vec<TrajectoryRecord>> {
    let at = |tau: f64| format!("p = {p}, tau = {tau}");
    match cfg.mode {
        Mode::AnalyticFamily => grid
            .iter()
            .map(|&tau| {
                {
                    let x: XParams = evolve_reduced_family(p, cfg.k, tau)?;
                    TrajectoryRecord::evaluate(tau, p, cfg.k, &make_x_state(&x)?)
                }
                .map_err(|e: Error| e.context(at(tau)))
            })
            .collect(),
        Mode::Numeric {
            omega1,
            omega2,
            v,
            step,
        } => {
            let sp = SystemParams::new(omega1, omega2, v, cfg.k)?;
            let traj = evolve_numeric(&werner_state(p)?, &sp, grid, step)
                .map_err(|e| e.context(format!("p = {p}")))?;
            traj.iter()
                .map(|(tau, rho)| {
                    TrajectoryRecord::evaluate(tau, p, cfg.k, rho).map_err(|e| e.context(at(tau)))
                })
                .collect()
        }
    }
}

/// Evaluates every `(p, τ)` grid point; records are sorted by `(p, τ)`.
pub fn run_trajectory_scan(cfg: &ScanConfig) -> Result<Vec<TrajectoryRecord>> {
    cfg.validate()?;
    let grid = uniform_grid(cfg.tau_max, cfg.samples)?;

    #[cfg(feature = "parallel")]
    let chunks: Vec<Result<Vec<TrajectoryRecord>>> = {
        use rayon::prelude::*;
        cfg.p_values
            .par_iter()
            .map(|&p| trajectory_for(p, cfg, &grid))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Result<Vec<TrajectoryRecord>>> = cfg
        .p_values
        .iter()
        .map(|&p| trajectory_for(p, cfg, &grid))
        .collect();

    let mut out = Vec::with_capacity(cfg.p_values.len() * grid.len());
    for chunk in chunks {
        out.extend(chunk?);
    }
    out.sort_by(|x, y| x.p.total_cmp(&y.p).then(x.tau.total_cmp(&y.tau)));
    Ok(out)
}

pub fn records_to_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in records {
        for (i, v) in r.values().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Parses a CSV written by [`records_to_csv`].
pub fn records_from_csv(text: &str) -> Result<Vec<TrajectoryRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?;
    if header != CSV_HEADER.join(",") {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    lines
        .enumerate()
        .map(|(no, line)| {
            let v: Vec<f64> = line
                .split(',')
                .map(|x| parse_num::<f64>("csv", x))
                .collect::<Result<_>>()?;
            if v.len() != CSV_HEADER.len() {
                return Err(Error::Parse(format!("row {}: {} columns", no + 1, v.len())));
            }
            Ok(TrajectoryRecord {
                tau: v[0],
                p: v[1],
                k: v[2],
                a: v[3],
                b: v[4],
                c: v[5],
                d: v[6],
                z_re: v[7],
                z_im: v[8],
                concurrence: v[9],
                chsh: v[10],
                bf3: v[11],
                teleport: v[12],
                hb: v[13],
                hbf3: v[14],
                hd: v[15],
                mec: v[16],
                nu: [v[17], v[18], v[19], v[20]],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(p: f64, samples: usize) -> ScanConfig {
        ScanConfig {
            p_values: vec![p],
            samples,
            ..ScanConfig::default()
        }
    }

    #[test]
    fn config_round_trip_and_overrides() {
        let text = "# scan\np_values = 0, 0.1,0.2\nk=0.25\ntau_max=10\nsamples=11\nseed=4\n";
        let c = ScanConfig::from_key_value(text).unwrap();
        assert_eq!(c.p_values, vec![0.0, 0.1, 0.2]);
        assert_eq!((c.k, c.tau_max, c.samples, c.seed), (0.25, 10.0, 11, 4));
        assert_eq!(c.mode, Mode::AnalyticFamily);

        let c = ScanConfig::from_key_value("V=7\nomega1=1\nomega2=1\nk=0.5").unwrap();
        assert!(matches!(c.mode, Mode::Numeric { v, .. } if v == 7.0));

        assert!(matches!(
            ScanConfig::from_key_value("colour=blue"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ScanConfig::from_key_value("p_values=1.5"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ScanConfig::from_key_value("k=1.0"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ScanConfig::from_key_value("samples=1"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn scan_p0_shape_and_zero_standard_measures() {
        let recs = run_trajectory_scan(&cfg(0.0, 301)).unwrap();
        assert_eq!(recs.len(), 301);
        for r in &recs {
            assert!(
                r.chsh <= 1e-12 && r.bf3 <= 1e-12 && r.teleport <= 1e-12,
                "{r:?}"
            );
            assert_eq!(r.hd, r.mec);
        }
        let (tau, c) = recs
            .iter()
            .map(|r| (r.tau, r.concurrence))
            .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((3.0..=4.5).contains(&tau), "{tau}");
        assert_abs_diff_eq!(c, 0.0251, epsilon = 2e-4);
    }

    #[test]
    fn scan_from_bell_state_decays() {
        let recs = run_trajectory_scan(&cfg(1.0, 31)).unwrap();
        assert_abs_diff_eq!(recs[0].concurrence, 1.0, epsilon = 1e-7);
        assert!(recs[1].concurrence < recs[0].concurrence);
    }

    #[test]
    fn scan_is_sorted_and_order_independent() {
        let mut c = cfg(0.0, 21);
        c.p_values = vec![0.3, 0.0, 0.1];
        let a = run_trajectory_scan(&c).unwrap();
        c.p_values = vec![0.1, 0.3, 0.0];
        let b = run_trajectory_scan(&c).unwrap();
        assert_eq!(records_to_csv(&a), records_to_csv(&b));
        assert!(a
            .windows(2)
            .all(|w| (w[0].p, w[0].tau) < (w[1].p, w[1].tau)));
    }

    #[test]
    fn numeric_scan_matches_analytic() {
        let mut c = cfg(0.2, 11);
        c.tau_max = 2.0;
        let a = run_trajectory_scan(&c).unwrap();
        c.mode = Mode::Numeric {
            omega1: 1.0,
            omega2: 1.0,
            v: 3.0,
            step: 1e-3,
        };
        let n = run_trajectory_scan(&c).unwrap();
        for (x, y) in a.iter().zip(&n) {
            for (u, v) in x.values().iter().zip(y.values()) {
                assert_abs_diff_eq!(*u, v, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let recs = run_trajectory_scan(&cfg(0.1, 5)).unwrap();
        let text = records_to_csv(&recs);
        assert!(text
            .starts_with("tau,p,k,a,b,c,d,z_re,z_im,C,B,BF3,D,HB,HBF3,HD,MEC,nu0,nu1,nu2,nu3\n"));
        assert_eq!(records_from_csv(&text).unwrap(), recs);
    }
}
