//! Special functions and Legendre machinery on S^{d-1}, d >= 3.

mod gamma;
mod legendre;
mod monomial;
mod quadrature;
mod sampling;

pub use gamma::{gamma, log_gamma_signed, surface_area, SignedLog};
pub use legendre::{
    legendre_batch, legendre_fill, legendre_norm_sq, n_harmonics, n_harmonics_f64, SphereGeometry, UNIT_SLACK,
};
pub use monomial::{
    monomial_diagonal, monomial_legendre_table, monomial_projection, monomial_projection_step, MonomialLegendreTable};
pub use quadrature::{
    desingularized_rule, gauss_legendre_unit, jacobi_quadrature, plain_rule, DotArg, QuadratureRule,
};
pub use sampling::{sample_sphere, sample_sphere_with};

/// Neumaier's compensated summation; additions are applied in call order.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
