//! Generalised power series `Σ c_k r^{e_k}` with real exponents, enough to run
//! Picard iterations of the radial integral equations symbolically near `r = 0`.

/// Terms with `|c| r_max^e` below this fraction of the leading size are dropped.
const PRUNE: f64 = 1e-22;
const EXP_MERGE: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PowerSeries {
    /// `(exponent, coefficient)`, sorted by exponent, exponents distinct.
    terms: Vec<(f64, f64)>,
}

impl PowerSeries {
    pub fn zero() -> Self {
        PowerSeries { terms: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            Self::zero()
        } else {
            PowerSeries { terms: vec![(0.0, c)] }
        }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(mut terms: Vec<(f64, f64)>, r_max: f64) -> Self {
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match merged.last_mut() {
                Some(last) if (last.0 - e).abs() <= EXP_MERGE * e.abs().max(1.0) => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        let scale = merged
            .iter()
            .map(|(e, c)| c.abs() * r_max.powf(*e))
            .fold(0.0, f64::max);
        merged.retain(|(e, c)| *c != 0.0 && c.abs() * r_max.powf(*e) > PRUNE * scale);
        PowerSeries { terms: merged }
    }

    pub fn add(&self, other: &PowerSeries, r_max: f64) -> PowerSeries {
        let mut t = self.terms.clone();
        t.extend_from_slice(&other.terms);
        Self::normalize(t, r_max)
    }

    pub fn mul(&self, other: &PowerSeries, r_max: f64) -> PowerSeries {
        let mut t = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                t.push((e1 + e2, c1 * c2));
            }
        }
        Self::normalize(t, r_max)
    }

    pub fn scale(&self, k: f64) -> PowerSeries {
        PowerSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// `|f|^p` on `(0, r_max]`, assuming the sign of `f` is that of its leading
    /// term there. `None` when the binomial expansion does not converge at `r_max`.
    pub fn abs_pow(&self, p: f64, r_max: f64) -> Option<PowerSeries> {
        let Some(&(e0, c0)) = self.terms.first() else {
            return Some(Self::zero());
        };
        let g = PowerSeries {
            terms: self.terms[1..].iter().map(|(e, c)| (e - e0, c / c0)).collect(),
        };
        let gmax: f64 = g.terms.iter().map(|(e, c)| c.abs() * r_max.powf(*e)).sum();
        if gmax >= 0.5 {
            return None;
        }
        let lead = PowerSeries {
            terms: vec![(e0 * p, c0.abs().powf(p))],
        };
        if g.is_zero() {
            return Some(lead);
        }
        // (1 + g)^p = Σ binom(p, k) g^k
        let mut sum = PowerSeries::constant(1.0);
        let mut gk = PowerSeries::constant(1.0);
        let mut binom = 1.0;
        for k in 1..200 {
            binom *= (p - (k as f64 - 1.0)) / k as f64;
            if binom == 0.0 {
                break;
            }
            gk = gk.mul(&g, r_max);
            let bound = binom.abs() * gmax.powi(k);
            sum = sum.add(&gk.scale(binom), r_max);
            if bound < PRUNE {
                break;
            }
        }
        Some(lead.mul(&sum, r_max))
    }

    /// `∫_0^r τ^{1−N} ∫_0^τ θ^{N−1+w} f(θ) dθ dτ`, termwise:
    /// `θ^q ↦ r^{q+w+2} / ((q+w+N)(q+w+2))`.
    pub fn radial_double_integral(&self, n: f64, w: f64) -> PowerSeries {
        PowerSeries {
            terms: self
                .terms
                .iter()
                .map(|(q, c)| (q + w + 2.0, c / ((q + w + n) * (q + w + 2.0))))
                .collect(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c * r.powf(*e)).sum()
    }

    pub fn eval_deriv(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(e, _)| *e != 0.0)
            .map(|(e, c)| c * e * r.powf(e - 1.0))
            .sum()
    }
}
