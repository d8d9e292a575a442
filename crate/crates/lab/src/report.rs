//! JSON report schemas. Every CLI output embeds the resolved config and the
//! seed, so any report can be replayed bit-for-bit.

use serde::{Deserialize, Serialize};

use consensus_lab_core::capacity::{CapacityReport, CapacityResult};
use consensus_lab_core::channel::BroadcastChannel;
use consensus_lab_core::common::{CommonStructure, EtaMargin};
use consensus_lab_core::sim::{ErrorReport, Estimate};

use crate::LabError;

/// Output envelope: schema tag, resolved config, seed, result.
#[derive(Debug, Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub seed: u64,
    pub config: C,
    pub result: R,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    text
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub label: String,
    pub y_members: Vec<String>,
    pub z_members: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaValue {
    Number(f64),
    Vacuous(String),
}

impl From<EtaMargin> for EtaValue {
    fn from(m: EtaMargin) -> Self {
        match m {
            EtaMargin::Value(v) => EtaValue::Number(v),
            EtaMargin::Vacuous => EtaValue::Vacuous("vacuous".to_string()),
        }
    }
}

/// Common-structure report emitted by `analyze`.
#[derive(Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub component_count: usize,
    pub components: Vec<ComponentInfo>,
    pub v_symbols: Vec<String>,
    /// Rows of `W(v|x)` indexed by input.
    pub common_channel: Vec<Vec<f64>>,
    pub effective_alphabet: Vec<String>,
    pub classes: Vec<Vec<String>>,
    /// Rows of the decomposition kernel, one per input, over the effective
    /// alphabet.
    pub ptilde: Vec<Vec<f64>>,
    pub gamma: Option<f64>,
    pub eta: EtaValue,
    /// Off-diagonal-maximal member of the undetectable kernel set.
    pub mixing_kernel: Vec<Vec<f64>>,
    pub mixing_kernel_off_diagonal: f64,
}

pub fn analyze_report(
    channel: &BroadcastChannel,
    cs: &CommonStructure,
) -> Result<AnalyzeReport, LabError> {
    let graph = cs.graph();
    let nv = cs.common_channel().output().len();
    let components = (0..nv)
        .map(|v| ComponentInfo {
            label: cs.common_channel().output().symbol(v).to_string(),
            y_members: (0..channel.y_alphabet().len())
                .filter(|&y| graph.phi_y()[y] == v)
                .map(|y| channel.y_alphabet().symbol(y).to_string())
                .collect(),
            z_members: (0..channel.z_alphabet().len())
                .filter(|&z| graph.phi_z()[z] == v)
                .map(|z| channel.z_alphabet().symbol(z).to_string())
                .collect(),
        })
        .collect();
    let kernel = cs.find_mixing_kernel(None)?;
    let nx = channel.x_alphabet().len();
    Ok(AnalyzeReport {
        component_count: graph.component_count(),
        components,
        v_symbols: cs.common_channel().output().symbols().to_vec(),
        common_channel: (0..nx).map(|x| cs.common_channel().row(x).to_vec()).collect(),
        effective_alphabet: cs
            .effective_alphabet()
            .iter()
            .map(|&u| channel.x_alphabet().symbol(u).to_string())
            .collect(),
        classes: cs
            .classes()
            .iter()
            .map(|c| {
                c.iter().map(|&x| channel.x_alphabet().symbol(x).to_string()).collect()
            })
            .collect(),
        ptilde: (0..nx).map(|x| cs.ptilde_row(x).to_vec()).collect(),
        gamma: cs.gamma_margin().ok(),
        eta: cs.eta_margin().into(),
        mixing_kernel: (0..nx).map(|x| kernel.row(x).to_vec()).collect(),
        mixing_kernel_off_diagonal: kernel.off_diagonal_mass(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CapacityValue {
    pub bits: f64,
    pub argmax: Vec<f64>,
    pub iterations: usize,
    pub gap: f64,
    pub grid_checked: bool,
}

impl From<&CapacityResult> for CapacityValue {
    fn from(r: &CapacityResult) -> Self {
        CapacityValue {
            bits: r.value,
            argmax: r.argmax.clone(),
            iterations: r.diagnostics.iterations,
            gap: r.diagnostics.gap,
            grid_checked: r.diagnostics.grid_checked,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CapacityJson {
    pub c_p2p_common: CapacityValue,
    pub c_byz: CapacityValue,
    pub c_com_msg: CapacityValue,
    /// Minimizing class-supported kernels behind the consensus value.
    pub inner_kernel_y: Option<Vec<Vec<f64>>>,
    pub inner_kernel_z: Option<Vec<Vec<f64>>>,
}

impl From<&CapacityReport> for CapacityJson {
    fn from(r: &CapacityReport) -> Self {
        CapacityJson {
            c_p2p_common: (&r.c_p2p_common).into(),
            c_byz: (&r.c_byz).into(),
            c_com_msg: (&r.c_com_msg).into(),
            inner_kernel_y: r.c_byz.inner_kernel_y.clone(),
            inner_kernel_z: r.c_byz.inner_kernel_z.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EstimateJson {
    pub value: f64,
    pub wilson95_radius: f64,
}

impl From<Estimate> for EstimateJson {
    fn from(e: Estimate) -> Self {
        EstimateJson { value: e.value, wilson95_radius: e.radius }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorReportJson {
    pub lambda_per_message: Vec<EstimateJson>,
    pub lambda_max: EstimateJson,
    pub eta_per_attack: Vec<(String, EstimateJson)>,
    pub eta_max: Option<EstimateJson>,
    pub eta_lenient_max: Option<f64>,
    pub p_e: f64,
    pub trials: u64,
    pub exact: bool,
}

impl From<&ErrorReport> for ErrorReportJson {
    fn from(r: &ErrorReport) -> Self {
        ErrorReportJson {
            lambda_per_message: r.lambda_per_message.iter().map(|&e| e.into()).collect(),
            lambda_max: r.lambda_max.into(),
            eta_per_attack: r
                .eta_per_attack
                .iter()
                .map(|(l, e)| (l.clone(), (*e).into()))
                .collect(),
            eta_max: r.eta_max.map(Into::into),
            eta_lenient_max: r.eta_lenient_max,
            p_e: r.p_e,
            trials: r.trials,
            exact: r.exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use consensus_lab_core::channel::make_bsc_mix;
    use consensus_lab_core::common::build_common_structure;

    #[test]
    fn analyze_report_of_bsc_mix() {
        let ch = make_bsc_mix(0.25).unwrap();
        let cs = build_common_structure(&ch);
        let report = analyze_report(&ch, &cs).unwrap();
        assert_eq!(report.component_count, 2);
        assert_eq!(report.effective_alphabet, vec!["0", "1"]);
        assert!(matches!(report.eta, EtaValue::Number(v) if (v - 0.5).abs() < 1e-9));
        let json = to_json(&report);
        assert!(json.contains("\"component_count\": 2"));
    }
}
