//! Closed forms for the tridiagonal matrix `B = (1−α²)(I + Γ⁻¹(Γ̃+2θI))`.
//!
//! The leading principal minors `δ_k` and trailing minors `φ_k` of `B` solve a
//! second-order linear recursion with characteristic roots `m±`. Powers of
//! `m₊` overflow near N ≈ 700, so everything is stored relative to them:
//! `δ̂_k = δ_k/m₊ᵏ` and `φ̂_k = φ_k/m₊^{N+2−k}`. Only the ratios
//! `m₋/m₊`, `ακ/m₊` and `α(κ−1)/m₊` are ever raised to a power. All three have
//! modulus below one.

use crate::{GameError, GameParams, Result};

/// |κ−1| below this uses the dedicated κ = 1 formulas.
pub const KAPPA_ONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoefficients {
    pub r: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub alpha: f64,
    pub kappa: f64,
}

impl ClosedFormCoefficients {
    /// m₋/m₊, in (−1, 1).
    pub fn ratio(&self) -> f64 {
        self.m_minus / self.m_plus
    }
}

pub fn coefficients(params: &GameParams) -> Result<ClosedFormCoefficients> {
    params.validate()?;
    let a = params.alpha();
    let a2 = a * a;
    let oma2 = params.one_minus_alpha_sq();
    let k = params.kappa();

    // s = 1+α²(κ−2)+κ and u = 1−α²(κ+2)+κ, regrouped to avoid cancellation.
    let s = (1.0 + k) * oma2 + a2 * (2.0 * k - 1.0);
    let u = (1.0 + k) * oma2 - a2;
    let v = 1.0 + oma2 * k;
    // R² = α⁴(κ−2)² − 2α²(2+(κ−1)κ) + (κ+1)² = u² + 8κα²(1−α²).
    let gap = 8.0 * k * a2 * oma2;
    let r2 = u * u + gap;
    let r = if r2 >= 0.0 {
        r2.sqrt()
    } else if r2 >= -1e-14 {
        0.0
    } else {
        return Err(GameError::Inconsistent(format!("negative radicand {r2}")));
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(GameError::Inconsistent(format!("degenerate root spread R = {r}")));
    }

    let m_plus = 0.5 * (s + r);
    let m_minus = a2 * k * (k - 1.0) / m_plus;

    let (c_plus, c_minus) = if u < 0.0 {
        let cp = 0.5 * gap / (r * (r - u));
        (cp, 1.0 - cp)
    } else {
        let cm = 0.5 * gap / (r * (r + u));
        (1.0 - cm, cm)
    };
    let d_minus = 2.0 * a2 * (k - 1.0) * oma2 / (r * (r + v));
    let d_plus = 1.0 - d_minus;

    Ok(ClosedFormCoefficients {
        r,
        m_plus,
        m_minus,
        c_plus,
        c_minus,
        d_plus,
        d_minus,
        alpha: a,
        kappa: k,
    })
}

/// δ and φ divided by the matching power of m₊.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSequences {
    /// `delta_hat[k] = δ_k/m₊ᵏ`, k = 0..=N.
    pub delta_hat: Vec<f64>,
    /// `δ_{N+1}/m₊^{N+1}`, i.e. det B scaled. Uses the last diagonal entry of
    /// B, which breaks the recursion, so it is not `c₊ + c₋(m₋/m₊)^{N+1}`.
    pub det_hat: f64,
    /// `phi_hat[k−2] = φ_k/m₊^{N+2−k}`, k = 2..=N+2.
    pub phi_hat: Vec<f64>,
    /// ln m₊.
    pub log_scale: f64,
    pub steps: usize,
}

impl ScaledSequences {
    /// δ̂_k for k = 0..=N+1.
    pub fn delta_hat_at(&self, k: usize) -> f64 {
        if k == self.steps + 1 {
            self.det_hat
        } else {
            self.delta_hat[k]
        }
    }

    /// φ̂_k for k = 2..=N+2.
    pub fn phi_hat_at(&self, k: usize) -> f64 {
        self.phi_hat[k - 2]
    }

    /// Unscaled δ_k. Overflows for large k; meant for small-N checks.
    pub fn delta(&self, k: usize) -> f64 {
        self.delta_hat_at(k) * (k as f64 * self.log_scale).exp()
    }

    /// Unscaled φ_k. Overflows for large N; meant for small-N checks.
    pub fn phi(&self, k: usize) -> f64 {
        self.phi_hat_at(k) * ((self.steps + 2 - k) as f64 * self.log_scale).exp()
    }
}

pub fn delta_phi_sequences(params: &GameParams) -> Result<ScaledSequences> {
    let c = coefficients(params)?;
    Ok(sequences_from(params, &c))
}

fn sequences_from(params: &GameParams, c: &ClosedFormCoefficients) -> ScaledSequences {
    let n = params.steps;
    let q = c.ratio();
    let delta_hat: Vec<f64> = (0..=n).map(|k| c.c_plus + c.c_minus * q.powi(k as i32)).collect();
    let phi_hat: Vec<f64> = (2..=n + 2)
        .map(|k| c.d_plus + c.d_minus * q.powi((n + 2 - k) as i32))
        .collect();
    let last = params.one_minus_alpha_sq() + c.kappa;
    let det_hat = last / c.m_plus * delta_hat[n] - q * delta_hat[n - 1];
    ScaledSequences {
        delta_hat,
        det_hat,
        phi_hat,
        log_scale: c.m_plus.ln(),
        steps: n,
    }
}

/// Bands of B: (sub, diag, sup), each 0-based.
pub fn b_bands(params: &GameParams) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = params.size();
    let a = params.alpha();
    let a2 = a * a;
    let oma2 = params.one_minus_alpha_sq();
    let k = params.kappa();
    let inner = (1.0 + k) * oma2 + a2 * (2.0 * k - 1.0);
    let mut diag = vec![inner; n];
    // 1 − 2α² + κ
    diag[0] = 2.0 * oma2 + k - 1.0;
    diag[n - 1] = oma2 + k;
    let sub = vec![-a * (k - 1.0); n - 1];
    let sup = vec![-a * k; n - 1];
    (sub, diag, sup)
}

/// Entries of B⁻¹ evaluated entirely in ratio space.
#[derive(Debug, Clone)]
pub struct BInverse {
    seq: ScaledSequences,
    m_plus: f64,
    upper_ratio: f64,
    lower_ratio: f64,
}

impl BInverse {
    pub fn new(params: &GameParams) -> Result<Self> {
        let c = coefficients(params)?;
        Ok(Self {
            seq: sequences_from(params, &c),
            m_plus: c.m_plus,
            upper_ratio: c.alpha * c.kappa / c.m_plus,
            lower_ratio: c.alpha * (c.kappa - 1.0) / c.m_plus,
        })
    }

    /// (B⁻¹)_{ij}, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        let max = self.seq.steps + 1;
        if i == 0 || j == 0 || i > max || j > max {
            return Err(GameError::IndexOutOfRange { i, j, max });
        }
        let denom = self.m_plus * self.seq.det_hat;
        let v = if i <= j {
            self.seq.delta_hat_at(i - 1)
                * self.seq.phi_hat_at(j + 1)
                * self.upper_ratio.powi((j - i) as i32)
        } else {
            self.seq.delta_hat_at(j - 1)
                * self.seq.phi_hat_at(i + 1)
                * self.lower_ratio.powi((i - j) as i32)
        };
        Ok(v / denom)
    }

    pub fn sequences(&self) -> &ScaledSequences {
        &self.seq
    }
}

pub fn b_inverse_entry(params: &GameParams, i: usize, j: usize) -> Result<f64> {
    BInverse::new(params)?.entry(i, j)
}

/// ω from its explicit component formula.
pub fn omega_closed_form(params: &GameParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.steps;
    let a = params.alpha();
    let k = params.kappa();
    let oma = params.one_minus_alpha();
    let g = a * (k - 1.0) / k;
    let denom = k * (k - a * (k - 1.0));
    Ok((1..=n + 1)
        .map(|i| (oma * k + a * g.powi((n + 1 - i) as i32)) / denom)
        .collect())
}

/// ν from the explicit B⁻¹ entries, O(N).
pub fn nu_closed_form(params: &GameParams) -> Result<Vec<f64>> {
    params.validate()?;
    if (params.kappa() - 1.0).abs() < KAPPA_ONE_TOL {
        return Ok(nu_kappa_one(params));
    }
    let c = coefficients(params)?;
    let seq = sequences_from(params, &c);
    let n1 = params.size();
    let oma = params.one_minus_alpha();
    // (1−α²)Γ⁻¹1
    let r = |i: usize| if i == 1 || i == n1 { oma } else { oma * oma };
    let p = c.alpha * (c.kappa - 1.0) / c.m_plus;
    let q = c.alpha * c.kappa / c.m_plus;

    // upper[i] = Σ_{j≥i} q^{j−i} φ̂_{j+1} r_j
    let mut upper = vec![0.0; n1 + 1];
    let mut acc = 0.0;
    for i in (1..=n1).rev() {
        acc = seq.phi_hat_at(i + 1) * r(i) + q * acc;
        upper[i] = acc;
    }
    // lower = Σ_{j<i} p^{i−j} δ̂_{j−1} r_j, advanced on the fly.
    let denom = c.m_plus * seq.det_hat;
    let mut lower = 0.0;
    let mut nu = Vec::with_capacity(n1);
    for i in 1..=n1 {
        let val = seq.phi_hat_at(i + 1) * lower + seq.delta_hat_at(i - 1) * upper[i];
        nu.push(val / denom);
        lower = p * (lower + seq.delta_hat_at(i - 1) * r(i));
    }
    Ok(nu)
}

fn nu_kappa_one(params: &GameParams) -> Vec<f64> {
    let n = params.steps;
    let a = params.alpha();
    let oma = params.one_minus_alpha();
    let oma2 = params.one_minus_alpha_sq();
    let two_m = 1.0 + oma2;
    let g = a / two_m;
    let pre = 1.0 / (2.0 + a);
    let mut nu = Vec::with_capacity(n + 1);
    nu.push(pre * (1.0 + 0.5 * two_m * g.powi((n + 1) as i32)));
    for i in 2..=n + 1 {
        nu.push(pre * (oma + oma2 * g.powi((n + 2 - i) as i32)));
    }
    nu
}
