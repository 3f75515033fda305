use std::path::{Path, PathBuf};

use super::{detect_birth_time, BIRTH_THRESHOLD};
use super::{records_to_csv, run_trajectory_scan, Mode, ScanConfig, TrajectoryRecord};
use crate::correlations::closed_forms_standard;
use crate::dynamics::evolve_reduced_family;
use crate::filtering::closed_forms_hidden;
use crate::io::{fmt_f64, write_text};
use crate::{Error, Result};

pub const FIGURE1_K: f64 = 0.5;
pub const FIGURE1_TAU_MAX: f64 = 30.0;
pub const FIGURE1_SAMPLES: usize = 3001;
/// Hidden measures count as saturated above this level.
pub const SATURATION: f64 = 0.99;

/// `p = i/30` for `i = 0..=10`.
pub fn figure1_p_values() -> [f64; 11] {
    std::array::from_fn(|i| i as f64 / 30.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    C,
    B,
    BF3,
    D,
    HB,
    HBF3,
    HD,
}

impl Measure {
    pub fn column(self) -> &'static str {
        match self {
            Measure::C => "C",
            Measure::B => "B",
            Measure::BF3 => "BF3",
            Measure::D => "D",
            Measure::HB => "HB",
            Measure::HBF3 => "HBF3",
            Measure::HD => "HD",
        }
    }

    /// Closed-form value along the reduced family.
    pub fn closed_form(self, p: f64, k: f64, tau: f64) -> Result<f64> {
        let x = evolve_reduced_family(p, k, tau)?;
        Ok(match self {
            Measure::C | Measure::B | Measure::BF3 | Measure::D => {
                let s = closed_forms_standard(&x)?;
                match self {
                    Measure::C => s.c,
                    Measure::B => s.b,
                    Measure::BF3 => s.bf3,
                    _ => s.d_family,
                }
            }
            _ => {
                let h = closed_forms_hidden(&x)?;
                match self {
                    Measure::HB => h.hb,
                    Measure::HBF3 => h.hbf3,
                    _ => h.hd,
                }
            }
        })
    }
}

/// `(τ, value)` pairs of one measure for a single `p`.
pub fn family_series(records: &[TrajectoryRecord], m: Measure) -> Vec<(f64, f64)> {
    records
        .iter()
        .map(|r| (r.tau, r.get(m.column()).expect("known column")))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub p: f64,
    pub c_max: f64,
    pub tau_c_max: f64,
    /// Birth times of C, HD, HBF₃ and HB.
    pub birth: [Option<f64>; 4],
    /// First time HD, HBF₃ and HB exceed [`SATURATION`].
    pub saturation: [Option<f64>; 3],
}

pub const SUMMARY_HEADER: &str =
    "p,C_max,tau_C_max,birth_C,birth_HD,birth_HBF3,birth_HB,tau099_HD,tau099_HBF3,tau099_HB";

impl SummaryRow {
    /// Summarizes one trajectory of the reduced family; crossings are
    /// refined on the closed forms.
    pub fn from_family(p: f64, k: f64, records: &[TrajectoryRecord]) -> Self {
        let (tau_c_max, c_max) = family_series(records, Measure::C).into_iter().fold(
            (0.0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
        let crossing = |m: Measure, level: f64| {
            let f = move |t: f64| m.closed_form(p, k, t).unwrap_or(f64::NAN);
            detect_birth_time(&family_series(records, m), level, Some(&f))
        };
        let birth = [Measure::C, Measure::HD, Measure::HBF3, Measure::HB]
            .map(|m| crossing(m, BIRTH_THRESHOLD));
        let saturation = [Measure::HD, Measure::HBF3, Measure::HB].map(|m| crossing(m, SATURATION));
        Self {
            p,
            c_max,
            tau_c_max,
            birth,
            saturation,
        }
    }

    fn to_csv_line(&self) -> String {
        let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), fmt_f64);
        let mut cells = vec![
            fmt_f64(self.p),
            fmt_f64(self.c_max),
            fmt_f64(self.tau_c_max),
        ];
        cells.extend(self.birth.iter().map(|x| opt(*x)));
        cells.extend(self.saturation.iter().map(|x| opt(*x)));
        cells.join(",")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Summary {
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

impl Figure1Summary {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        for r in &self.rows {
            out.push_str(&r.to_csv_line());
            out.push('\n');
        }
        out
    }
}

/// Writes one CSV per `p` plus `figure1_summary.csv` into `dir`.
pub fn figure1_dataset(dir: impl AsRef<Path>) -> Result<Figure1Summary> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ps = figure1_p_values();
    let cfg = ScanConfig {
        p_values: ps.to_vec(),
        k: FIGURE1_K,
        tau_max: FIGURE1_TAU_MAX,
        samples: FIGURE1_SAMPLES,
        mode: Mode::AnalyticFamily,
        output_path: Some(dir.to_path_buf()),
        seed: 0,
    };
    let records = run_trajectory_scan(&cfg)?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for (i, chunk) in records.chunks(FIGURE1_SAMPLES).enumerate() {
        let path = dir.join(format!("figure1_p{i:02}.csv"));
        write_text(&path, &records_to_csv(chunk))?;
        files.push(path);
        rows.push(SummaryRow::from_family(ps[i], FIGURE1_K, chunk));
    }
    let mut summary = Figure1Summary { rows, files };
    let path = dir.join("figure1_summary.csv");
    write_text(&path, &summary.to_csv())?;
    summary.files.push(path);
    Ok(summary)
}
