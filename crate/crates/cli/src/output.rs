//! CSV and plain-text rendering of key-rate results.

use cvqkd_core::oracle::suite::CheckOutcome;
use cvqkd_core::oracle::Threshold;
use cvqkd_core::{ChannelParams, KeyRateBreakdown, Method, ProtocolSpec, SweepAxis};

pub const HEADER: &str = "protocol,recon,V,T1,T2,W1,W2,T_eff,method,i_ab,s_e,s_e_cond,holevo,key_rate";
pub const THRESHOLD_HEADER: &str = "protocol,recon,V,W1,W2,axis,method,threshold";
pub const VERIFY_HEADER: &str = "check,status,detail";

/// One evaluated point, as printed in a single output line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub spec: ProtocolSpec,
    pub params: ChannelParams,
    pub method: Method,
    pub breakdown: KeyRateBreakdown,
}

impl Record {
    pub fn floor_zero(mut self) -> Self {
        self.breakdown.key_rate = self.breakdown.key_rate.max(0.0);
        self
    }

    fn fields(&self) -> Vec<String> {
        let p = &self.params;
        let k = &self.breakdown;
        let mut out = vec![
            self.spec.protocol_name().to_string(),
            self.spec.recon_name().to_string(),
        ];
        out.extend([p.v, p.t1, p.t2, p.w1, p.w2, p.t_eff()].map(format_float));
        out.push(self.method.name().to_string());
        out.extend([k.i_ab, k.s_e, k.s_e_cond, k.holevo, k.key_rate].map(format_float));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRecord {
    pub spec: ProtocolSpec,
    pub v: f64,
    pub w1: f64,
    pub w2: f64,
    pub axis: SweepAxis,
    pub method: Method,
    pub threshold: Threshold,
}

impl ThresholdRecord {
    fn fields(&self) -> Vec<String> {
        let value = match self.threshold {
            Threshold::At(t) => format_float(t),
            Threshold::NeverPositive => "never-positive".to_string(),
        };
        vec![
            self.spec.protocol_name().to_string(),
            self.spec.recon_name().to_string(),
            format_float(self.v),
            format_float(self.w1),
            format_float(self.w2),
            self.axis.name().to_string(),
            self.method.name().to_string(),
            value,
        ]
    }
}

/// Shortest decimal that round-trips the value rounded to 12 significant
/// digits. Negative zero prints as `0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn csv(header: &str, lines: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let records = std::iter::once(split_header(header)).chain(lines);
    for fields in records {
        w.write_record(&fields).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
}

fn split_header(header: &str) -> Vec<String> {
    header.split(',').map(str::to_string).collect()
}

/// Columns padded to a common width; text columns left-aligned, the rest
/// right-aligned.
fn table(header: Vec<String>, rows: Vec<Vec<String>>, left_aligned: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i < left_aligned {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn emit_csv(records: &[Record]) -> String {
    csv(HEADER, records.iter().map(Record::fields))
}

pub fn emit_text(records: &[Record]) -> String {
    let rows = records.iter().map(|r| {
        let mut f = r.fields();
        // method column next to the protocol
        let method = f.remove(8);
        f.insert(2, method);
        f
    });
    let mut header = split_header(HEADER);
    let method = header.remove(8);
    header.insert(2, method);
    table(header, rows.collect(), 3)
}

pub fn emit_threshold_csv(records: &[ThresholdRecord]) -> String {
    csv(THRESHOLD_HEADER, records.iter().map(ThresholdRecord::fields))
}

pub fn emit_threshold_text(records: &[ThresholdRecord]) -> String {
    table(
        split_header(THRESHOLD_HEADER),
        records.iter().map(ThresholdRecord::fields).collect(),
        2,
    )
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn emit_verify_csv(checks: &[CheckOutcome]) -> String {
    csv(
        VERIFY_HEADER,
        checks
            .iter()
            .map(|c| vec![c.name.to_string(), status(c.passed).to_string(), c.detail.clone()]),
    )
}

pub fn emit_verify_text(checks: &[CheckOutcome]) -> String {
    let rows = checks
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                status(c.passed).to_string(),
                (i + 1).to_string(),
                c.name.to_string(),
                c.detail.clone(),
            ]
        })
        .collect();
    let header = ["status", "#", "check", "detail"].map(str::to_string).to_vec();
    let mut out = table(header, rows, 4);
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} passed, {failed} failed\n", checks.len() - failed));
    out
}
