//! Option-quote term-structure pipeline: ingest quote CSVs, apply the
//! filter chain, build per-maturity spline smiles, extract ATM skew and
//! curvature, and fit power laws to the resulting term structure.
//!
//! Standardized moneyness is `k/(σ_ATM √θ)` with `σ_ATM` the bucket's
//! closest-to-ATM quoted vol — a convention of this pipeline. Day count
//! is ACT/365. The outlier rule is deterministic: a point is dropped when
//! its vol deviates from the median of a 5-point window (in moneyness
//! order) by more than 5 median absolute deviations.

use chrono::NaiveDate;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::spline::{NaturalCubicSpline, SplineError};

#[derive(Debug, Clone, Error)]
pub enum EmpiricalError {
    #[error("insufficient data: need at least 4 smile points, got {0}")]
    InsufficientData(usize),
    #[error("need at least 4 distinct maturities, got {0}")]
    MaturityCount(usize),
    #[error("first three values are not monotone in magnitude")]
    Ordering,
    #[error("values must share one sign and be non-zero for a log-log fit")]
    MixedSigns,
    #[error("csv row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("ATM point k = 0 outside the bucket's moneyness range")]
    AtmOutsideRange,
    #[error(transparent)]
    Spline(#[from] SplineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionType {
    Call,
    Put,
}

/// One raw market quote row. `implied_vol = None` models a missing field.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OptionQuote {
    pub quote_date: NaiveDate,
    pub expiry: NaiveDate,
    pub symbol: String,
    pub option_type: OptionType,
    pub strike: f64,
    pub forward: f64,
    pub implied_vol: Option<f64>,
    pub volume: u64,
    pub open_interest: u64,
}

impl OptionQuote {
    /// ACT/365 year fraction from quote date to expiry.
    pub fn theta(&self) -> f64 {
        (self.expiry - self.quote_date).num_days() as f64 / 365.0
    }

    /// Log-moneyness `k = log(K/F)`.
    pub fn log_moneyness(&self) -> f64 {
        (self.strike / self.forward).ln()
    }
}

/// First failing filter rule, in the order the rules are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    OpenInterest,
    Volume,
    MaturityWindow,
    MissingIv,
    Symbol,
    Moneyness,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::OpenInterest => "open-interest",
            RejectReason::Volume => "volume",
            RejectReason::MaturityWindow => "maturity-window",
            RejectReason::MissingIv => "missing-iv",
            RejectReason::Symbol => "symbol",
            RejectReason::Moneyness => "moneyness",
        }
    }
}

pub const THETA_MIN: f64 = 3.0 / 365.0;
pub const THETA_MAX: f64 = 1.0;
pub const MAX_STD_MONEYNESS: f64 = 0.75;
pub const MIN_BUCKET_SPAN: f64 = 0.5;
pub const MIN_OTM_COUNT: usize = 4;

/// The closest-to-ATM quoted vol of a `(quote_date, expiry)` group,
/// among quotes that carry a vol. Ties in |k| break toward the lower
/// strike so the choice is deterministic.
fn bucket_atm_vol(quotes: &[&OptionQuote]) -> Option<f64> {
    quotes
        .iter()
        .filter_map(|q| q.implied_vol.map(|iv| (q.log_moneyness().abs(), q.strike, iv)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
        .map(|(_, _, iv)| iv)
}

/// Apply the six row-level filter rules. Every rejection carries its
/// first failing rule; kept and rejected partition the input.
pub fn filter_quotes(raw: &[OptionQuote]) -> (Vec<OptionQuote>, Vec<(OptionQuote, RejectReason)>) {
    // Standardized moneyness needs each group's ATM vol.
    let mut groups: BTreeMap<(NaiveDate, NaiveDate), Vec<&OptionQuote>> = BTreeMap::new();
    for q in raw {
        groups.entry((q.quote_date, q.expiry)).or_default().push(q);
    }
    let atm: BTreeMap<(NaiveDate, NaiveDate), Option<f64>> = groups
        .iter()
        .map(|(key, quotes)| (*key, bucket_atm_vol(quotes)))
        .collect();

    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for q in raw {
        let reason = first_failing_rule(q, atm[&(q.quote_date, q.expiry)]);
        match reason {
            None => kept.push(q.clone()),
            Some(r) => rejected.push((q.clone(), r)),
        }
    }
    (kept, rejected)
}

fn first_failing_rule(q: &OptionQuote, atm_vol: Option<f64>) -> Option<RejectReason> {
    if q.open_interest == 0 {
        return Some(RejectReason::OpenInterest);
    }
    if q.volume == 0 {
        return Some(RejectReason::Volume);
    }
    let theta = q.theta();
    if !(THETA_MIN..=THETA_MAX).contains(&theta) {
        return Some(RejectReason::MaturityWindow);
    }
    if q.implied_vol.is_none() {
        return Some(RejectReason::MissingIv);
    }
    if q.symbol != "SPX" {
        return Some(RejectReason::Symbol);
    }
    // A quote reaching this rule carries a vol, so the group ATM vol exists.
    let atm = atm_vol.expect("group has at least this quote's vol");
    let std_moneyness = q.log_moneyness() / (atm * theta.sqrt());
    if std_moneyness.abs() > MAX_STD_MONEYNESS {
        return Some(RejectReason::Moneyness);
    }
    None
}

/// All kept quotes of one `(quote_date, expiry)` pair.
#[derive(Debug, Clone)]
pub struct MaturityBucket {
    pub quote_date: NaiveDate,
    pub expiry: NaiveDate,
    /// ACT/365 year fraction, inside [3/365, 1].
    pub theta: f64,
    pub quotes: Vec<OptionQuote>,
    /// Closest-to-ATM quoted vol, the standardized-moneyness scale.
    pub atm_vol: f64,
}

/// Group kept quotes into maturity buckets, ordered by (θ, quote date).
pub fn build_buckets(kept: &[OptionQuote]) -> Vec<MaturityBucket> {
    let mut groups: BTreeMap<(NaiveDate, NaiveDate), Vec<OptionQuote>> = BTreeMap::new();
    for q in kept {
        groups
            .entry((q.quote_date, q.expiry))
            .or_default()
            .push(q.clone());
    }
    let mut buckets: Vec<MaturityBucket> = groups
        .into_iter()
        .filter_map(|((quote_date, expiry), quotes)| {
            let refs: Vec<&OptionQuote> = quotes.iter().collect();
            let atm_vol = bucket_atm_vol(&refs)?;
            let theta = quotes[0].theta();
            Some(MaturityBucket {
                quote_date,
                expiry,
                theta,
                quotes,
                atm_vol,
            })
        })
        .collect();
    buckets.sort_by(|a, b| {
        a.theta
            .total_cmp(&b.theta)
            .then(a.quote_date.cmp(&b.quote_date))
    });
    buckets
}

/// The bucket's (k, vol) points after outlier removal, sorted in k with
/// duplicate strikes averaged.
fn cleaned_points(b: &MaturityBucket) -> (Vec<(f64, f64)>, usize) {
    let mut pts: Vec<(f64, f64)> = b
        .quotes
        .iter()
        .filter_map(|q| q.implied_vol.map(|iv| (q.log_moneyness(), iv)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Average duplicate moneyness (a call and put at the same strike).
    let mut merged: Vec<(f64, f64, usize)> = Vec::with_capacity(pts.len());
    for (k, iv) in pts {
        match merged.last_mut() {
            Some((k0, sum, n)) if *k0 == k => {
                *sum += iv;
                *n += 1;
            }
            _ => merged.push((k, iv, 1)),
        }
    }
    let pts: Vec<(f64, f64)> = merged
        .into_iter()
        .map(|(k, sum, n)| (k, sum / n as f64))
        .collect();

    // 5-point moving median / MAD outlier rule.
    let n = pts.len();
    let mut keep = vec![true; n];
    let mut dropped = 0;
    if n >= 3 {
        for i in 0..n {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n);
            let mut window: Vec<f64> = pts[lo..hi].iter().map(|p| p.1).collect();
            window.sort_by(f64::total_cmp);
            let med = window[window.len() / 2];
            let mut devs: Vec<f64> = window.iter().map(|v| (v - med).abs()).collect();
            devs.sort_by(f64::total_cmp);
            let mad = devs[devs.len() / 2];
            if (pts[i].1 - med).abs() > 5.0 * mad {
                keep[i] = false;
                dropped += 1;
            }
        }
    }
    (
        pts.into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect(),
        dropped,
    )
}

/// Why a bucket was rejected at validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketRejectReason {
    MoneynessSpan,
    OtmPutCount,
    OtmCallCount,
}

impl BucketRejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            BucketRejectReason::MoneynessSpan => "moneyness-span",
            BucketRejectReason::OtmPutCount => "otm-put-count",
            BucketRejectReason::OtmCallCount => "otm-call-count",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BucketDiagnostics {
    pub accepted: bool,
    pub reason: Option<BucketRejectReason>,
    pub max_std_moneyness: f64,
    pub otm_puts: usize,
    pub otm_calls: usize,
    pub outliers_dropped: usize,
}

/// Accept a bucket when, after outlier removal, the standardized
/// moneyness span reaches 0.5 and there are at least four OTM-put and
/// four OTM-call vols.
pub fn validate_bucket(b: &MaturityBucket) -> BucketDiagnostics {
    let (points, outliers_dropped) = cleaned_points(b);
    let scale = b.atm_vol * b.theta.sqrt();
    let max_std_moneyness = points
        .iter()
        .map(|(k, _)| (k / scale).abs())
        .fold(0.0, f64::max);
    let kept_ks: Vec<f64> = points.iter().map(|(k, _)| *k).collect();
    let is_kept = |q: &OptionQuote| {
        q.implied_vol.is_some() && kept_ks.iter().any(|&k| (k - q.log_moneyness()) == 0.0)
    };
    let otm_puts = b
        .quotes
        .iter()
        .filter(|q| q.option_type == OptionType::Put && q.log_moneyness() < 0.0 && is_kept(q))
        .count();
    let otm_calls = b
        .quotes
        .iter()
        .filter(|q| q.option_type == OptionType::Call && q.log_moneyness() > 0.0 && is_kept(q))
        .count();

    let reason = if max_std_moneyness < MIN_BUCKET_SPAN {
        Some(BucketRejectReason::MoneynessSpan)
    } else if otm_puts < MIN_OTM_COUNT {
        Some(BucketRejectReason::OtmPutCount)
    } else if otm_calls < MIN_OTM_COUNT {
        Some(BucketRejectReason::OtmCallCount)
    } else {
        None
    };
    BucketDiagnostics {
        accepted: reason.is_none(),
        reason,
        max_std_moneyness,
        otm_puts,
        otm_calls,
        outliers_dropped,
    }
}

/// Natural cubic spline of vol against log-moneyness; value, slope and
/// curvature at k = 0.
pub fn spline_atm(b: &MaturityBucket) -> Result<(f64, f64, f64), EmpiricalError> {
    let (points, _) = cleaned_points(b);
    if points.len() < 4 {
        return Err(EmpiricalError::InsufficientData(points.len()));
    }
    let (ks, ivs): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    if ks[0] > 0.0 || *ks.last().expect("non-empty") < 0.0 {
        return Err(EmpiricalError::AtmOutsideRange);
    }
    let spline = NaturalCubicSpline::new(ks, ivs)?;
    Ok((
        spline.value(0.0)?,
        spline.derivative(0.0)?,
        spline.second_derivative(0.0)?,
    ))
}

/// Power-law fit `|value| ≈ amplitude · θ^exponent` with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Common sign of the fitted values (+1 or -1); the fit itself is on
    /// magnitudes.
    pub sign: i8,
}

/// Ordinary least squares of `log|value|` on `log θ`.
///
/// Preconditions: at least four distinct maturities, one common non-zero
/// sign, and the first three values (in increasing θ) monotone in
/// magnitude.
pub fn fit_power_law(thetas: &[f64], values: &[f64]) -> Result<PowerLawFit, EmpiricalError> {
    assert_eq!(thetas.len(), values.len(), "parallel slices");
    let mut pairs: Vec<(f64, f64)> = thetas.iter().copied().zip(values.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut distinct = 0;
    for i in 0..pairs.len() {
        if i == 0 || pairs[i].0 != pairs[i - 1].0 {
            distinct += 1;
        }
    }
    if distinct < 4 {
        return Err(EmpiricalError::MaturityCount(distinct));
    }
    if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(EmpiricalError::MixedSigns);
    }
    let sign = pairs[0].1.signum();
    if pairs.iter().any(|(_, v)| v.signum() != sign) {
        return Err(EmpiricalError::MixedSigns);
    }
    let m0 = pairs[0].1.abs();
    let m1 = pairs[1].1.abs();
    let m2 = pairs[2].1.abs();
    if !((m0 <= m1 && m1 <= m2) || (m0 >= m1 && m1 >= m2)) {
        return Err(EmpiricalError::Ordering);
    }

    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, v)| v.abs().ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(PowerLawFit {
        exponent: slope,
        amplitude: intercept.exp(),
        r_squared,
        n_points: pairs.len(),
        sign: if sign >= 0.0 { 1 } else { -1 },
    })
}

/// Power-law fit or a structured skip record.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum FitOutcome {
    Fit(PowerLawFit),
    Skipped { skipped: String },
}

/// One row of the per-bucket output CSV.
#[derive(Debug, Clone)]
pub struct BucketRow {
    pub theta: f64,
    pub atm_iv: Option<f64>,
    pub skew: Option<f64>,
    pub curvature: Option<f64>,
    pub accepted: bool,
    pub reject_reason: Option<&'static str>,
}

/// Full pipeline output.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub rows: Vec<BucketRow>,
    pub skew_fit: FitOutcome,
    pub curvature_fit: FitOutcome,
    pub n_kept: usize,
    pub n_rejected: usize,
}

/// The whole chain: filter, bucket, validate, spline, fit. Buckets are
/// processed in parallel; the fit stage is sequential over the (small)
/// term structure.
pub fn run_pipeline(raw: &[OptionQuote]) -> PipelineResult {
    let (kept, rejected) = filter_quotes(raw);
    let buckets = build_buckets(&kept);
    let rows: Vec<BucketRow> = buckets
        .par_iter()
        .map(|b| {
            let diag = validate_bucket(b);
            if !diag.accepted {
                return BucketRow {
                    theta: b.theta,
                    atm_iv: None,
                    skew: None,
                    curvature: None,
                    accepted: false,
                    reject_reason: diag.reason.map(|r| r.as_str()),
                };
            }
            match spline_atm(b) {
                Ok((atm_iv, skew, curvature)) => BucketRow {
                    theta: b.theta,
                    atm_iv: Some(atm_iv),
                    skew: Some(skew),
                    curvature: Some(curvature),
                    accepted: true,
                    reject_reason: None,
                },
                Err(_) => BucketRow {
                    theta: b.theta,
                    atm_iv: None,
                    skew: None,
                    curvature: None,
                    accepted: false,
                    reject_reason: Some("spline-failure"),
                },
            }
        })
        .collect();

    let fit_of = |select: &dyn Fn(&BucketRow) -> Option<f64>| -> FitOutcome {
        let mut thetas = Vec::new();
        let mut values = Vec::new();
        for row in rows.iter().filter(|r| r.accepted) {
            if let Some(v) = select(row) {
                thetas.push(row.theta);
                values.push(v);
            }
        }
        match fit_power_law(&thetas, &values) {
            Ok(fit) => FitOutcome::Fit(fit),
            Err(e) => FitOutcome::Skipped {
                skipped: match e {
                    EmpiricalError::MaturityCount(_) => "count".to_string(),
                    EmpiricalError::Ordering => "ordering".to_string(),
                    EmpiricalError::MixedSigns => "sign".to_string(),
                    other => other.to_string(),
                },
            },
        }
    };
    let skew_fit = fit_of(&|r| r.skew);
    let curvature_fit = fit_of(&|r| r.curvature);
    PipelineResult {
        rows,
        skew_fit,
        curvature_fit,
        n_kept: kept.len(),
        n_rejected: rejected.len(),
    }
}

/// Write per-bucket results as CSV
/// (`theta,atm_iv,skew,curvature,accepted,reject_reason`).
pub fn write_bucket_csv<W: std::io::Write>(
    out: &mut W,
    rows: &[BucketRow],
) -> std::io::Result<()> {
    writeln!(out, "theta,atm_iv,skew,curvature,accepted,reject_reason")?;
    for r in rows {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.theta,
            fmt(r.atm_iv),
            fmt(r.skew),
            fmt(r.curvature),
            r.accepted,
            r.reject_reason.unwrap_or("")
        )?;
    }
    Ok(())
}

/// Parse the input CSV schema
/// `quote_date,expiry,symbol,option_type,strike,forward,implied_vol,volume,open_interest`
/// (ISO-8601 dates, empty implied_vol = missing). Errors carry the 1-based
/// data row number and the offending column.
pub fn parse_quotes_csv<R: std::io::Read>(reader: R) -> Result<Vec<OptionQuote>, EmpiricalError> {
    const HEADER: [&str; 9] = [
        "quote_date",
        "expiry",
        "symbol",
        "option_type",
        "strike",
        "forward",
        "implied_vol",
        "volume",
        "open_interest",
    ];
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| EmpiricalError::Csv {
            row: 0,
            message: e.to_string(),
        })?
        .clone();
    for (i, want) in HEADER.iter().enumerate() {
        let got = headers.get(i).unwrap_or("");
        if got != *want {
            return Err(EmpiricalError::Csv {
                row: 0,
                message: format!("column {} must be '{}', got '{}'", i + 1, want, got),
            });
        }
    }

    let mut out = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| EmpiricalError::Csv {
            row,
            message: e.to_string(),
        })?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let date = |i: usize| {
            NaiveDate::parse_from_str(field(i), "%Y-%m-%d").map_err(|e| EmpiricalError::Csv {
                row,
                message: format!("column '{}': bad date '{}' ({e})", HEADER[i], field(i)),
            })
        };
        let num = |i: usize| {
            field(i).parse::<f64>().map_err(|_| EmpiricalError::Csv {
                row,
                message: format!("column '{}': bad number '{}'", HEADER[i], field(i)),
            })
        };
        let int = |i: usize| {
            field(i).parse::<u64>().map_err(|_| EmpiricalError::Csv {
                row,
                message: format!("column '{}': bad integer '{}'", HEADER[i], field(i)),
            })
        };
        let option_type = match field(3) {
            "call" => OptionType::Call,
            "put" => OptionType::Put,
            other => {
                return Err(EmpiricalError::Csv {
                    row,
                    message: format!("column 'option_type': expected call|put, got '{other}'"),
                })
            }
        };
        let implied_vol = if field(6).is_empty() {
            None
        } else {
            Some(num(6)?)
        };
        out.push(OptionQuote {
            quote_date: date(0)?,
            expiry: date(1)?,
            symbol: field(2).to_string(),
            option_type,
            strike: num(4)?,
            forward: num(5)?,
            implied_vol,
            volume: int(7)?,
            open_interest: int(8)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn quote(
        days: i64,
        strike: f64,
        option_type: OptionType,
        iv: Option<f64>,
    ) -> OptionQuote {
        let quote_date = NaiveDate::from_ymd_opt(2023, 1, 3).unwrap();
        OptionQuote {
            quote_date,
            expiry: quote_date + chrono::Duration::days(days),
            symbol: "SPX".into(),
            option_type,
            strike,
            forward: 100.0,
            implied_vol: iv,
            volume: 10,
            open_interest: 5,
        }
    }

    /// A clean synthetic bucket: vols from a smooth smile on ±0.7
    /// standardized moneyness, both wings populated.
    pub(crate) fn clean_bucket_quotes(days: i64, n_side: usize) -> Vec<OptionQuote> {
        let theta = days as f64 / 365.0;
        let scale = 0.2 * theta.sqrt();
        let mut quotes = Vec::new();
        for i in 0..(2 * n_side + 1) {
            let m = -0.7 + 1.4 * i as f64 / (2 * n_side) as f64;
            let k = m * scale;
            let iv = 0.2 - 0.1 * k + 0.8 * k * k;
            let ty = if k <= 0.0 { OptionType::Put } else { OptionType::Call };
            quotes.push(quote(days, 100.0 * k.exp(), ty, Some(iv)));
        }
        quotes
    }

    #[test]
    fn each_rule_fires() {
        let base = || quote(30, 100.0, OptionType::Put, Some(0.2));
        let mut zero_oi = base();
        zero_oi.open_interest = 0;
        let mut zero_vol = base();
        zero_vol.volume = 0;
        let short = quote(2, 100.0, OptionType::Put, Some(0.2));
        let missing = quote(30, 100.0, OptionType::Put, None);
        let mut wrong_symbol = base();
        wrong_symbol.symbol = "SPXW".into();
        // |k| beyond 0.75 · 0.2 · √θ
        let theta: f64 = 30.0 / 365.0;
        let far_k = 0.8 * 0.2 * theta.sqrt();
        let far = quote(30, 100.0 * far_k.exp(), OptionType::Call, Some(0.2));
        let good = base();

        let raw = vec![
            zero_oi,
            zero_vol,
            short,
            missing,
            wrong_symbol,
            far,
            good.clone(),
        ];
        let (kept, rejected) = filter_quotes(&raw);
        assert_eq!(kept, vec![good]);
        let reasons: Vec<RejectReason> = rejected.iter().map(|(_, r)| *r).collect();
        assert_eq!(
            reasons,
            vec![
                RejectReason::OpenInterest,
                RejectReason::Volume,
                RejectReason::MaturityWindow,
                RejectReason::MissingIv,
                RejectReason::Symbol,
                RejectReason::Moneyness,
            ]
        );
    }

    #[test]
    fn filter_is_idempotent() {
        let raw = clean_bucket_quotes(40, 8);
        let (kept, rejected) = filter_quotes(&raw);
        assert!(rejected.is_empty());
        let (kept2, rejected2) = filter_quotes(&kept);
        assert_eq!(kept, kept2);
        assert!(rejected2.is_empty());
    }

    #[test]
    fn bucket_validation_counts() {
        let quotes = clean_bucket_quotes(40, 10);
        let buckets = build_buckets(&quotes);
        assert_eq!(buckets.len(), 1);
        let diag = validate_bucket(&buckets[0]);
        assert!(diag.accepted, "{diag:?}");
        assert!(diag.max_std_moneyness >= 0.5);

        // Only 3 OTM puts -> rejected with the put-count reason.
        let theta: f64 = 40.0 / 365.0;
        let scale = 0.2 * theta.sqrt();
        let mut quotes = Vec::new();
        for i in 1..=3 {
            let k = -0.7 * scale * i as f64 / 3.0;
            quotes.push(quote(40, 100.0 * k.exp(), OptionType::Put, Some(0.2)));
        }
        for i in 1..=6 {
            let k = 0.7 * scale * i as f64 / 6.0;
            quotes.push(quote(40, 100.0 * k.exp(), OptionType::Call, Some(0.2)));
        }
        let buckets = build_buckets(&quotes);
        let diag = validate_bucket(&buckets[0]);
        assert!(!diag.accepted);
        assert_eq!(diag.reason, Some(BucketRejectReason::OtmPutCount));

        // Narrow span -> rejected on the span rule.
        let mut quotes = Vec::new();
        for i in 0..12 {
            let k = (-0.4 + 0.8 * i as f64 / 11.0) * scale;
            let ty = if k <= 0.0 { OptionType::Put } else { OptionType::Call };
            quotes.push(quote(40, 100.0 * k.exp(), ty, Some(0.2)));
        }
        let buckets = build_buckets(&quotes);
        let diag = validate_bucket(&buckets[0]);
        assert!(!diag.accepted);
        assert_eq!(diag.reason, Some(BucketRejectReason::MoneynessSpan));
    }

    #[test]
    fn outlier_is_removed() {
        let mut quotes = clean_bucket_quotes(40, 10);
        // Corrupt one interior vol by a large factor.
        quotes[10].implied_vol = Some(0.9);
        let buckets = build_buckets(&quotes);
        let diag = validate_bucket(&buckets[0]);
        assert_eq!(diag.outliers_dropped, 1, "{diag:?}");
    }

    #[test]
    fn spline_recovers_quadratic_smile() {
        // σ(k) = 0.2 + 0.3k + 1.0k² on 15 nodes
        let days = 40;
        let mut quotes = Vec::new();
        for i in 0..15 {
            let k = -0.2 + 0.4 * i as f64 / 14.0;
            let iv = 0.2 + 0.3 * k + 1.0 * k * k;
            let ty = if k <= 0.0 { OptionType::Put } else { OptionType::Call };
            quotes.push(quote(days, 100.0 * k.exp(), ty, Some(iv)));
        }
        let buckets = build_buckets(&quotes);
        let (atm, skew, curv) = spline_atm(&buckets[0]).unwrap();
        assert!((atm - 0.2).abs() < 1e-3, "atm {atm}");
        assert!((skew - 0.3).abs() < 1e-3, "skew {skew}");
        assert!((curv - 2.0).abs() < 1e-3, "curv {curv}");
    }

    #[test]
    fn spline_flat_bucket() {
        let days = 40;
        let mut quotes = Vec::new();
        for i in 0..9 {
            let k = -0.2 + 0.4 * i as f64 / 8.0;
            let ty = if k <= 0.0 { OptionType::Put } else { OptionType::Call };
            quotes.push(quote(days, 100.0 * k.exp(), ty, Some(0.2)));
        }
        let buckets = build_buckets(&quotes);
        let (atm, skew, curv) = spline_atm(&buckets[0]).unwrap();
        assert!((atm - 0.2).abs() < 1e-9);
        assert!(skew.abs() < 1e-9);
        assert!(curv.abs() < 1e-7);
    }

    #[test]
    fn spline_needs_four_points() {
        let quotes = vec![
            quote(40, 95.0, OptionType::Put, Some(0.22)),
            quote(40, 100.0, OptionType::Put, Some(0.21)),
            quote(40, 105.0, OptionType::Call, Some(0.2)),
        ];
        let buckets = build_buckets(&quotes);
        assert!(matches!(
            spline_atm(&buckets[0]),
            Err(EmpiricalError::InsufficientData(3))
        ));
    }

    #[test]
    fn power_law_exact_recovery() {
        let thetas = [0.02f64, 0.05, 0.1, 0.2];
        let values: Vec<f64> = thetas.iter().map(|t| 2.0 * t.powf(-0.4)).collect();
        let fit = fit_power_law(&thetas, &values).unwrap();
        assert!((fit.exponent + 0.4).abs() < 1e-12);
        assert!((fit.amplitude - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.sign, 1);
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn power_law_preconditions() {
        assert!(matches!(
            fit_power_law(&[0.02, 0.05, 0.1], &[1.0, 2.0, 3.0]),
            Err(EmpiricalError::MaturityCount(3))
        ));
        assert!(matches!(
            fit_power_law(&[0.02, 0.05, 0.1, 0.2], &[1.0, -2.0, 3.0, 4.0]),
            Err(EmpiricalError::MixedSigns)
        ));
        assert!(matches!(
            fit_power_law(&[0.02, 0.05, 0.1, 0.2], &[1.0, 3.0, 2.0, 4.0]),
            Err(EmpiricalError::Ordering)
        ));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let input = "\
quote_date,expiry,symbol,option_type,strike,forward,implied_vol,volume,open_interest
2023-01-03,2023-02-03,SPX,put,3800,3850.5,0.21,10,5
2023-01-03,2023-02-03,SPX,call,3900,3850.5,,10,5
";
        let quotes = parse_quotes_csv(input.as_bytes()).unwrap();
        assert_eq!(quotes.len(), 2);
        assert_eq!(quotes[0].implied_vol, Some(0.21));
        assert_eq!(quotes[1].implied_vol, None);

        let bad_date = "\
quote_date,expiry,symbol,option_type,strike,forward,implied_vol,volume,open_interest
2023-01-03,03/02/2023,SPX,put,3800,3850.5,0.21,10,5
";
        match parse_quotes_csv(bad_date.as_bytes()) {
            Err(EmpiricalError::Csv { row, message }) => {
                assert_eq!(row, 1);
                assert!(message.contains("expiry"), "{message}");
            }
            other => panic!("expected csv error, got {other:?}"),
        }

        let bad_header = "a,b,c\n1,2,3\n";
        assert!(matches!(
            parse_quotes_csv(bad_header.as_bytes()),
            Err(EmpiricalError::Csv { row: 0, .. })
        ));
    }

    #[test]
    fn pipeline_end_to_end_shape() {
        // Smiles whose ATM slope scales like θ^{-0.3}; the fit should
        // recover that exponent.
        let mut raw = Vec::new();
        for days in [15, 30, 60, 120, 240] {
            let theta = days as f64 / 365.0;
            let slope = -0.05 * theta.powf(-0.3);
            let scale = 0.2 * theta.sqrt();
            for i in 0..21 {
                let m = -0.7 + 1.4 * i as f64 / 20.0;
                let k = m * scale;
                let iv = 0.2 + slope * k + 0.8 * k * k;
                let ty = if k <= 0.0 { OptionType::Put } else { OptionType::Call };
                raw.push(quote(days, 100.0 * k.exp(), ty, Some(iv)));
            }
        }
        let result = run_pipeline(&raw);
        assert_eq!(result.rows.len(), 5);
        assert!(result.rows.iter().all(|r| r.accepted));
        match result.skew_fit {
            FitOutcome::Fit(fit) => {
                assert!((fit.exponent + 0.3).abs() < 0.02, "exponent {}", fit.exponent);
                assert_eq!(fit.sign, -1);
            }
            FitOutcome::Skipped { skipped } => panic!("fit skipped: {skipped}"),
        }
    }
}
