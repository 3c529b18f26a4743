use crate::error::{Error, Result};

/// Accepted solver steps with cubic Hermite dense output.
///
/// Each sample stores the state and its time derivative, so the base
/// interpolant on `[t_i, t_{i+1}]` is the unique cubic matching both ends.
/// Solver steps may add a quartic correction `theta^2 (1-theta)^2 c` which
/// turns the cubic into the integrator's own fourth-order continuous
/// extension. At a sample time the stored state is returned unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    /// Correction for the interval ending at each sample (zero for the first).
    corr: Vec<f64>,
    tol: f64,
}

impl Trajectory {
    pub(crate) fn new(dim: usize, tol: f64) -> Self {
        Trajectory {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
            corr: Vec::new(),
            tol,
        }
    }

    /// Append a sample; `corr` is the quartic correction of the interval
    /// that ends here.
    pub(crate) fn push(&mut self, t: f64, y: &[f64], dy: &[f64], corr: &[f64]) {
        debug_assert_eq!(y.len(), self.dim);
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.states.extend_from_slice(y);
        self.derivs.extend_from_slice(dy);
        self.corr.extend_from_slice(corr);
    }

    /// Build a trajectory from externally computed samples. Times must be
    /// strictly increasing.
    pub fn from_samples(
        dim: usize,
        times: Vec<f64>,
        states: Vec<f64>,
        derivs: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        if dim == 0 || states.len() != times.len() * dim || derivs.len() != states.len() {
            return Err(Error::invalid(
                "trajectory sample arrays have inconsistent lengths",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "trajectory sample times must be strictly increasing",
            ));
        }
        let corr = vec![0.0; states.len()];
        Ok(Trajectory {
            dim,
            times,
            states,
            derivs,
            corr,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Tolerance the solver was asked to achieve.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn state_at_sample(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv_at_sample(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    /// Interpolated state at `t`.
    pub fn state(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.state_into(t, &mut out)?;
        Ok(out)
    }

    /// Interpolated component `k` at `t`.
    pub fn component(&self, t: f64, k: usize) -> Result<f64> {
        let (i, theta, h) = self.locate(t)?;
        if theta == 0.0 {
            return Ok(self.state_at_sample(i)[k]);
        }
        Ok(self.hermite(i, theta, h, k))
    }

    pub fn state_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (i, theta, h) = self.locate(t)?;
        if theta == 0.0 {
            out.copy_from_slice(self.state_at_sample(i));
            return Ok(());
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.hermite(i, theta, h, k);
        }
        Ok(())
    }

    fn locate(&self, t: f64) -> Result<(usize, f64, f64)> {
        if self.times.is_empty() || t < self.start() || t > self.end() || t.is_nan() {
            return Err(Error::OutsideDomain {
                t,
                lo: self.times.first().copied().unwrap_or(f64::NAN),
                hi: self.times.last().copied().unwrap_or(f64::NAN),
            });
        }
        match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => Ok((i, 0.0, 0.0)),
            Err(j) => {
                let i = j - 1;
                let h = self.times[i + 1] - self.times[i];
                Ok((i, (t - self.times[i]) / h, h))
            }
        }
    }

    fn hermite(&self, i: usize, theta: f64, h: f64, k: usize) -> f64 {
        let y0 = self.state_at_sample(i)[k];
        let y1 = self.state_at_sample(i + 1)[k];
        let d0 = h * self.deriv_at_sample(i)[k];
        let d1 = h * self.deriv_at_sample(i + 1)[k];
        let c = self.corr[(i + 1) * self.dim + k];
        let dy = y1 - y0;
        let s = 1.0 - theta;
        y0 + theta * (dy + s * ((d0 - dy) + theta * (2.0 * dy - d0 - d1 + s * c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        // y = t^3 - 2t, y' = 3t^2 - 2
        let ts = [0.0, 0.7, 1.5, 3.0];
        let ys: Vec<f64> = ts.iter().map(|t| t * t * t - 2.0 * t).collect();
        let ds: Vec<f64> = ts.iter().map(|t| 3.0 * t * t - 2.0).collect();
        let tr = Trajectory::from_samples(1, ts.to_vec(), ys, ds, 0.0).unwrap();
        for i in 0..=60 {
            let t = 3.0 * i as f64 / 60.0;
            let v = tr.component(t, 0).unwrap();
            assert!((v - (t * t * t - 2.0 * t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn exact_at_samples_and_bounded() {
        let tr = Trajectory::from_samples(1, vec![0.0, 1.0], vec![0.1, 0.3], vec![5.0, -7.0], 0.0)
            .unwrap();
        assert_eq!(tr.component(0.0, 0).unwrap(), 0.1);
        assert_eq!(tr.component(1.0, 0).unwrap(), 0.3);
        assert!(tr.component(1.0 + 1e-9, 0).is_err());
        assert!(tr.component(-1e-9, 0).is_err());
    }

    #[test]
    fn rejects_unsorted_samples() {
        assert!(
            Trajectory::from_samples(1, vec![0.0, 0.0], vec![0.0; 2], vec![0.0; 2], 0.0).is_err()
        );
        assert!(Trajectory::from_samples(2, vec![0.0], vec![0.0; 1], vec![0.0; 1], 0.0).is_err());
    }
}
