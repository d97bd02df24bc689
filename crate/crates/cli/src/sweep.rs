//! Parameter sweeps over the collective dephasing strength, with CSV and
//! JSON emission built for byte-identical reruns.

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};

use dicke_witness::noise::{noisy_dicke_state, NoiseParams, MAX_DEPHASING};
use dicke_witness::states::phased_dicke4;
use dicke_witness::tensor::{fidelity_with_pure, Operator, StateVector};
use dicke_witness::witness::{
    bar_witness, closed_form_expectations, multipartite_witness, robustness_bound_from_value,
    structure_factor, Axis,
};

/// Evenly spaced q2 values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Q2Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Q2Grid {
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| self.start + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Full description of one sweep run; echoed into JSON output so a result
/// file carries its own provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub q1: f64,
    pub q3: f64,
    pub q2_grid: Q2Grid,
    pub output_path: Option<String>,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            q1: 0.05,
            q3: 0.05,
            q2_grid: Q2Grid {
                start: 0.0,
                stop: 0.5,
                steps: 51,
            },
            output_path: None,
            format: OutputFormat::Csv,
            seed: 7,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        let g = &self.q2_grid;
        if g.steps < 2 {
            bail!("q2 grid needs at least 2 steps, got {}", g.steps);
        }
        for (name, v) in [
            ("q1", self.q1),
            ("q3", self.q3),
            ("q2-start", g.start),
            ("q2-stop", g.stop),
        ] {
            if !(0.0..=MAX_DEPHASING).contains(&v) {
                bail!("{name} = {v} outside [0, {MAX_DEPHASING}]");
            }
        }
        if g.stop <= g.start {
            bail!("q2-stop ({}) must exceed q2-start ({})", g.stop, g.start);
        }
        Ok(())
    }
}

/// One grid point. `wbar_matrix` comes from the full Kraus computation,
/// `wbar_closed_form` from the polynomial expressions; they agree to 1e-9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q2: f64,
    pub sxx: f64,
    pub syy: f64,
    pub szz: f64,
    pub wbar_matrix: f64,
    pub wbar_closed_form: f64,
    pub wmult: f64,
    pub fidelity: f64,
    pub er_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Witness zero crossing, linearly interpolated between the bracketing
    /// grid rows; `None` when the witness does not change sign on the grid.
    pub zero_crossing: Option<f64>,
}

/// Operators reused across all grid rows.
struct SweepOperators {
    wbar: Operator,
    sxx: Operator,
    syy: Operator,
    szz: Operator,
    wmult: Operator,
    dicke: StateVector,
}

impl SweepOperators {
    fn build() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            wbar: bar_witness(),
            sxx: structure_factor(Axis::X, Axis::X, pi, 4).expect("fixed parameters"),
            syy: structure_factor(Axis::Y, Axis::Y, pi, 4).expect("fixed parameters"),
            szz: structure_factor(Axis::Z, Axis::Z, 0.0, 4).expect("fixed parameters"),
            wmult: multipartite_witness(),
            dicke: phased_dicke4(),
        }
    }
}

pub fn run_sweep(config: &SweepConfig) -> anyhow::Result<SweepOutcome> {
    config.validate()?;
    let ops = SweepOperators::build();
    let mut rows = Vec::with_capacity(config.q2_grid.steps);
    for q2 in config.q2_grid.values() {
        let params = NoiseParams::new(config.q1, q2, config.q3)?;
        let rho = noisy_dicke_state(&params)?;
        let wbar_matrix = rho.expectation(&ops.wbar)?;
        let closed = closed_form_expectations(&params)?;
        let row = SweepRow {
            q2,
            sxx: rho.expectation(&ops.sxx)?,
            syy: rho.expectation(&ops.syy)?,
            szz: rho.expectation(&ops.szz)?,
            wbar_matrix,
            wbar_closed_form: closed.wbar,
            wmult: rho.expectation(&ops.wmult)?,
            fidelity: fidelity_with_pure(&rho, &ops.dicke)?,
            er_bound: robustness_bound_from_value(wbar_matrix, &ops.wbar)?,
        };
        ensure!(
            (row.wbar_matrix - row.wbar_closed_form).abs() <= 1e-9,
            "matrix and closed-form witness values diverge at q2 = {q2}"
        );
        rows.push(row);
    }
    let zero_crossing = find_zero_crossing(&rows);
    Ok(SweepOutcome {
        rows,
        zero_crossing,
    })
}

fn find_zero_crossing(rows: &[SweepRow]) -> Option<f64> {
    rows.windows(2).find_map(|pair| {
        let (a, b) = (&pair[0], &pair[1]);
        if a.wbar_matrix < 0.0 && b.wbar_matrix >= 0.0 {
            let t = -a.wbar_matrix / (b.wbar_matrix - a.wbar_matrix);
            Some(a.q2 + t * (b.q2 - a.q2))
        } else {
            None
        }
    })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "q2,sxx,syy,szz,wbar_matrix,wbar_closed_form,wmult,fidelity,er_bound";

/// 17 significant digits: enough for exact f64 round trips, locale-free.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.q2,
            r.sxx,
            r.syy,
            r.szz,
            r.wbar_matrix,
            r.wbar_closed_form,
            r.wmult,
            r.fidelity,
            r.er_bound,
        ];
        let line: Vec<String> = fields.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> anyhow::Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty CSV input")?;
    ensure!(header == CSV_HEADER, "unexpected CSV header: {header}");
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.parse::<f64>()
                    .with_context(|| format!("row {}: bad field '{f}'", idx + 1))
            })
            .collect::<anyhow::Result<_>>()?;
        ensure!(fields.len() == 9, "row {}: expected 9 fields", idx + 1);
        rows.push(SweepRow {
            q2: fields[0],
            sxx: fields[1],
            syy: fields[2],
            szz: fields[3],
            wbar_matrix: fields[4],
            wbar_closed_form: fields[5],
            wmult: fields[6],
            fidelity: fields[7],
            er_bound: fields[8],
        });
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct JsonDocument<'a> {
    config: &'a SweepConfig,
    rows: &'a [SweepRow],
}

pub fn render_json(config: &SweepConfig, rows: &[SweepRow]) -> String {
    let doc = JsonDocument { config, rows };
    let mut text = serde_json::to_string_pretty(&doc).expect("sweep rows serialize infallibly");
    text.push('\n');
    text
}
