// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use wpecm::ecm::single_q_norm_sq;
use wpecm::photon_sim::{
    estimate_from_counts, mean_std, rng_for, simulate_counts_with, statistical_floor, ExperimentConfig,
};
use wpecm::recipes::{run_fig2, run_fig3, Fig2Recipe, Fig3Recipe};
use wpecm::report::{csv_string, Provenance};
use wpecm::*;

use crate::args::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse(_) => 2,
            Self::Domain(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<wpecm::Error> for CliError {
    fn from(e: wpecm::Error) -> Self {
        Self::Domain(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn resolve(cli: Cli) -> Result<RunConfig> {
    match (cli.config, cli.command) {
        (Some(_), Some(_)) => Err(CliError::Parse("give either --config or a subcommand, not both".into())),
        (None, Some(cmd)) => Ok(cmd),
        (Some(path), None) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(CliError::Parse("no subcommand given (see --help)".into())),
    }
}

pub fn execute(cfg: &RunConfig) -> Result<String> {
    let result = match cfg {
        RunConfig::Measure(a) => measure(a),
        RunConfig::Ecm(a) => ecm(a),
        RunConfig::Budget(a) => budget(a),
        RunConfig::Sweep(a) => sweep(cfg, a),
        RunConfig::Simulate(a) => simulate(cfg, a),
    }?;
    to_json(&json!({ "config": cfg, "result": result }))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Domain(e.to_string()))
}

fn device(e: &ErrArgs) -> Device {
    DeviceError::new(e.eps_q.to_radians(), e.eps_h.to_radians(), e.eps_dq.to_radians(), e.eps_dh.to_radians())
}

pub fn parse_state(s: &str) -> Result<State> {
    match s.trim().to_ascii_lowercase().as_str() {
        "s1" => Ok(QubitState::s1()),
        "s2" => Ok(QubitState::s2()),
        other => {
            let parts = other
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| CliError::Parse(format!("state `{s}`: {e}")))?;
            let [x, y, z] = parts[..] else {
                return Err(CliError::Parse(format!("state `{s}` must be s1, s2 or x,y,z")));
            };
            Ok(QubitState::new(Vec3::new(x, y, z))?)
        }
    }
}

fn modes(choice: SchemeChoice) -> Vec<Mode> {
    match choice {
        SchemeChoice::Ncm => vec![Mode::Ncm],
        SchemeChoice::Ecm => vec![Mode::Ecm],
        SchemeChoice::Both => vec![Mode::Ncm, Mode::Ecm],
    }
}

fn measure(a: &MeasureArgs) -> Result<serde_json::Value> {
    let s = AngleSetting::from_degrees(a.setting.q, a.setting.h);
    let ideal = s.ideal_vector();
    let realized = s.realized_vector(&device(&a.err));
    Ok(json!({
        "ideal": ideal.to_array(),
        "realized": realized.to_array(),
        "difference_norm": (realized - ideal).norm(),
    }))
}

fn ecm(a: &SettingArgs) -> Result<serde_json::Value> {
    let seed = AngleSetting::from_degrees(a.q, a.h);
    let cm = ecm4(seed);
    let mut sens = serde_json::Map::new();
    let mut certified = true;
    for c in ErrorChannel::ALL {
        let v = summed_sensitivity(&cm, c);
        if c != ErrorChannel::QAxis {
            certified &= v.max_abs() <= 1e-12;
        }
        sens.insert(c.name().into(), json!(v.to_array()));
    }
    Ok(json!({
        "composite": cm.to_record(),
        "summed_sensitivity": sens,
        "first_order_cancelled": certified,
        "residual_q_norm_sq": residual_q_norm_sq(&cm),
        "single_q_norm_sq": single_q_norm_sq(seed),
    }))
}

fn budget(a: &BudgetArgs) -> Result<serde_json::Value> {
    let state = parse_state(&a.state)?;
    let mags = DeviceError::uniform(a.angle_err.to_radians(), a.phase_err.to_radians());
    Ok(json!({
        "state": state.s.to_array(),
        "ncm_coefficients": ncm_quadratic_coefficients(&state),
        "ecm_coefficient": ecm_quadratic_coefficient(&state),
        "budget": predicted_error_budget(&state, &mags)?,
    }))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    csv_string(rows).map(String::into_bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    to_json(v).map(String::into_bytes)
}

pub fn fig3_recipe(a: &SweepArgs) -> Result<Fig3Recipe> {
    let mut r = match a.recipe {
        Recipe::Fig3Lower => Fig3Recipe::lower(a.seed),
        _ => Fig3Recipe::upper(a.seed),
    };
    if a.recipe == Recipe::Custom && a.grid.is_empty() {
        return Err(CliError::Parse("custom sweep needs --grid".into()));
    }
    if let Some(s) = &a.state {
        r.state = parse_state(s)?.s.to_array();
    }
    if let Some(s) = a.scheme {
        r.modes = modes(s);
    }
    if !a.channel.is_empty() {
        r.channels = a
            .channel
            .iter()
            .map(|c| c.parse::<ErrorChannel>().map_err(CliError::Parse))
            .collect::<Result<_>>()?;
    }
    if !a.grid.is_empty() {
        r.grid_deg = a.grid.clone();
    }
    if let Some(p) = a.photons {
        r.photons = p;
    }
    if let Some(n) = a.runs {
        r.runs = n;
    }
    Ok(r)
}

fn sweep(cfg: &RunConfig, a: &SweepArgs) -> Result<serde_json::Value> {
    let main_csv = with_ext(&a.out, ".csv");
    let main_json = with_ext(&a.out, ".json");
    if a.recipe == Recipe::Fig2 {
        let recipe = Fig2Recipe::default();
        let out = run_fig2(&recipe)?;
        let slopes = with_ext(&a.out, ".slopes.csv");
        write_file(&main_csv, &csv_bytes(&out.rows)?)?;
        write_file(&slopes, &csv_bytes(&out.slopes)?)?;
        let doc = Provenance { config: json!({ "run": cfg, "resolved": recipe }), data: &out };
        write_file(&main_json, &json_bytes(&doc)?)?;
        return Ok(json!({ "files": [main_csv, slopes, main_json], "slopes": out.slopes }));
    }

    let recipe = fig3_recipe(a)?;
    let out = run_fig3(&recipe)?;
    let analytic = with_ext(&a.out, ".analytic.csv");
    write_file(&main_csv, &csv_bytes(&out.monte_carlo)?)?;
    write_file(&analytic, &csv_bytes(&out.analytic)?)?;
    let doc = Provenance { config: json!({ "run": cfg, "resolved": recipe }), data: &out };
    write_file(&main_json, &json_bytes(&doc)?)?;
    Ok(json!({ "files": [main_csv, analytic, main_json], "points": out.monte_carlo.len() }))
}

fn simulate(cfg: &RunConfig, a: &SimulateArgs) -> Result<serde_json::Value> {
    let state = parse_state(&a.state)?;
    let mode = match a.scheme {
        SchemeChoice::Ncm => Mode::Ncm,
        SchemeChoice::Ecm => Mode::Ecm,
        SchemeChoice::Both => return Err(CliError::Parse("simulate takes --scheme ncm or ecm".into())),
    };
    let err = device(&a.err);
    let mut exp = ExperimentConfig::new(pauli_scheme(mode), state, err, a.seed);
    exp.photons_per_arm = a.photons;
    exp.runs = a.runs;
    exp.validate()?;

    let mut runs = Vec::with_capacity(a.runs);
    let mut err_sq = Vec::with_capacity(a.runs);
    for run in 0..a.runs {
        let counts = simulate_counts_with(&exp, &err, &mut rng_for(a.seed, 0, run as u32))?;
        let s_hat = estimate_from_counts(&exp.scheme, &counts)?;
        let e = (s_hat - state.s).norm_sq();
        err_sq.push(e);
        runs.push(json!({ "counts": counts, "estimate": s_hat.to_array(), "err_sq": e }));
    }
    let (mean, std) = mean_std(&err_sq);
    let result = json!({
        "runs": runs,
        "mean_err_sq": mean,
        "std_err_sq": std,
        "exact_bias_sq": systematic_error_exact(&exp.scheme, &state, &err).norm_sq(),
        "statistical_floor": statistical_floor(&exp.scheme, &state, &err, a.photons)?,
    });
    match &a.out {
        Some(path) => {
            write_file(path, &json_bytes(&json!({ "config": cfg, "result": &result }))?)?;
            Ok(json!({ "files": [path], "mean_err_sq": mean, "std_err_sq": std }))
        }
        None => Ok(result),
    }
}
