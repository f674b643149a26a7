//! Frequency-selective channel generation.
//!
//! Desired links use a clustered multipath model: each realization is a sum
//! of rays grouped into clusters, every ray carrying a complex normal gain, a
//! Laplacian angle pair around its cluster means, and a delay spread over the
//! tap window by a root-raised-cosine pulse. The self-interference channel at
//! the full-duplex node is Rician: a deterministic spherical-wave LOS matrix
//! (the arrays are in each other's near field) plus a clustered NLOS part.
//!
//! Tap-domain channels convert to per-subcarrier matrices with a U-point DFT,
//! which assumes the cyclic prefix is long enough (`U >= D`).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::rng::Rng;

const PI: f64 = core::f64::consts::PI;

/// Antenna array element positions, in wavelength units.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<[f64; 3]>,
}

impl ArrayGeometry {
    /// Horizontal uniform linear array along x with exactly half-wavelength
    /// element spacing, first element at the origin.
    pub fn ula_horizontal(num_elements: usize) -> Self {
        assert!(num_elements >= 1, "array needs at least one element");
        ArrayGeometry {
            positions: (0..num_elements)
                .map(|n| [0.5 * n as f64, 0.0, 0.0])
                .collect(),
        }
    }

    pub fn from_positions(positions: Vec<[f64; 3]>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidGeometry("array has no elements"));
        }
        if positions.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidGeometry("non-finite element position"));
        }
        Ok(ArrayGeometry { positions })
    }

    /// Same array rigidly shifted by `offset` (wavelengths).
    pub fn translated(&self, offset: [f64; 3]) -> Self {
        ArrayGeometry {
            positions: self
                .positions
                .iter()
                .map(|p| [p[0] + offset[0], p[1] + offset[1], p[2] + offset[2]])
                .collect(),
        }
    }

    pub fn num_elements(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }
}

/// Parameters of one clustered-channel realization.
///
/// `n_clust` and `n_rays` are the counts for this realization (callers that
/// randomize them per trial draw the counts first and then build the params).
/// When a fixed cluster mean is given it is shared by every cluster; when
/// `None`, each cluster draws its mean angle uniformly on `[0, pi]`.
#[derive(Clone, Debug)]
pub struct ClusterParams {
    pub n_clust: usize,
    pub n_rays: usize,
    pub cluster_mean_aoa: Option<f64>,
    pub cluster_mean_aod: Option<f64>,
    /// Per-ray angular standard deviation around the cluster mean, radians.
    pub angle_spread_std: f64,
    /// Channel impulse-response length D in taps.
    pub delay_span_taps: usize,
    /// Samples per second, 1/Ts.
    pub sampling_rate: f64,
    /// Root-raised-cosine rolloff of the pulse spreading rays across taps.
    pub rolloff: f64,
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_clust < 1 || self.n_rays < 1 {
            return Err(Error::InvalidArgument(
                "cluster and ray counts must be >= 1",
            ));
        }
        for mean in [self.cluster_mean_aoa, self.cluster_mean_aod]
            .into_iter()
            .flatten()
        {
            if !(0.0..=PI).contains(&mean) {
                return Err(Error::InvalidArgument("cluster mean angle outside [0, pi]"));
            }
        }
        if !self.angle_spread_std.is_finite() || self.angle_spread_std < 0.0 {
            return Err(Error::InvalidArgument(
                "angle spread must be finite and >= 0",
            ));
        }
        if self.delay_span_taps < 1 {
            return Err(Error::InvalidArgument("delay span must be >= 1 tap"));
        }
        if !self.sampling_rate.is_finite() || self.sampling_rate <= 0.0 {
            return Err(Error::InvalidArgument("sampling rate must be positive"));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(Error::InvalidArgument("rolloff must lie in [0, 1]"));
        }
        Ok(())
    }

    fn symbol_period(&self) -> f64 {
        1.0 / self.sampling_rate
    }
}

/// Time-domain MIMO impulse response: D matrices of identical shape.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTaps {
    taps: Vec<CMat>,
}

impl ChannelTaps {
    pub fn new(taps: Vec<CMat>) -> Result<Self> {
        let first = taps
            .first()
            .ok_or(Error::InvalidArgument("channel needs at least one tap"))?;
        let shape = first.shape();
        if taps.iter().any(|t| t.shape() != shape) {
            return Err(Error::DimensionMismatch("taps differ in shape"));
        }
        Ok(ChannelTaps { taps })
    }

    pub fn taps(&self) -> &[CMat] {
        &self.taps
    }

    pub fn num_taps(&self) -> usize {
        self.taps.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.taps[0].shape()
    }

    /// Total tap energy, sum over d of squared Frobenius norms.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.frob_norm_sq()).sum()
    }
}

/// Per-subcarrier frequency response: U matrices of identical shape.
#[derive(Clone, Debug, PartialEq)]
pub struct SubcarrierChannels {
    subchannels: Vec<CMat>,
}

impl SubcarrierChannels {
    pub fn new(subchannels: Vec<CMat>) -> Result<Self> {
        let first = subchannels
            .first()
            .ok_or(Error::InvalidArgument("need at least one subcarrier"))?;
        let shape = first.shape();
        if subchannels.iter().any(|m| m.shape() != shape) {
            return Err(Error::DimensionMismatch(
                "subcarrier matrices differ in shape",
            ));
        }
        Ok(SubcarrierChannels { subchannels })
    }

    pub fn subchannels(&self) -> &[CMat] {
        &self.subchannels
    }

    pub fn num_subcarriers(&self) -> usize {
        self.subchannels.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.subchannels[0].shape()
    }
}

/// Rician self-interference channel parameters.
#[derive(Clone, Debug)]
pub struct SiChannelParams {
    /// Rician factor as a linear power ratio.
    pub rician_kappa: f64,
    pub nlos_params: ClusterParams,
    pub geometry_tx: ArrayGeometry,
    pub geometry_rx: ArrayGeometry,
}

/// Unit-norm ULA steering vector: element n is
/// `(1/sqrt(N)) * exp(i * pi * n * cos(angle))` for half-wavelength spacing,
/// with the angle measured from the array axis on `[0, pi]`.
pub fn ula_response(num_elements: usize, angle: f64) -> Result<Vec<C64>> {
    if num_elements < 1 {
        return Err(Error::InvalidArgument("steering vector needs >= 1 element"));
    }
    if !angle.is_finite() {
        return Err(Error::InvalidArgument("steering angle must be finite"));
    }
    let scale = 1.0 / libm::sqrt(num_elements as f64);
    let step = PI * libm::cos(angle);
    Ok((0..num_elements)
        .map(|n| {
            let phase = step * n as f64;
            C64::new(scale * libm::cos(phase), scale * libm::sin(phase))
        })
        .collect())
}

/// Peak-normalized root-raised-cosine impulse response.
///
/// Normalization puts `p(0) = 1 + rolloff * (4/pi - 1)`; with that scale the
/// pulse has unit energy in symbol-period units
/// (`integral of p(t)^2 dt = symbol_period` for every rolloff), which is what
/// keeps the clustered channel's expected tap energy at `Nt * Nr`. The
/// removable singularities at `t = 0` and `t = ±Ts/(4 * rolloff)` are
/// evaluated by their analytic limits.
pub fn rrc_pulse(t: f64, rolloff: f64, symbol_period: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rolloff), "rolloff outside [0, 1]");
    debug_assert!(symbol_period > 0.0, "symbol period must be positive");
    let x = t / symbol_period;
    if libm::fabs(x) < 1e-12 {
        return 1.0 + rolloff * (4.0 / PI - 1.0);
    }
    let fourbx = 4.0 * rolloff * x;
    if rolloff > 0.0 && libm::fabs(libm::fabs(fourbx) - 1.0) < 1e-9 {
        let arg = PI / (4.0 * rolloff);
        return rolloff / libm::sqrt(2.0)
            * ((1.0 + 2.0 / PI) * libm::sin(arg) + (1.0 - 2.0 / PI) * libm::cos(arg));
    }
    let num = libm::sin(PI * x * (1.0 - rolloff)) + fourbx * libm::cos(PI * x * (1.0 + rolloff));
    let den = PI * x * (1.0 - fourbx * fourbx);
    num / den
}

/// One propagation path of a clustered channel realization.
#[derive(Clone, Debug)]
pub struct Ray {
    pub gain: C64,
    /// Absolute delay in seconds.
    pub delay: f64,
    /// Angle of arrival, radians.
    pub aoa: f64,
    /// Angle of departure, radians.
    pub aod: f64,
}

/// Draw the ray set for one realization: per cluster a mean angle pair
/// (fixed or uniform on `[0, pi]`), then per ray a complex normal gain, a
/// delay uniform over the sampling-instant span `[0, (D-1) * Ts]`, and
/// Laplacian angles around the cluster means.
pub fn draw_rays(params: &ClusterParams, rng: &mut Rng) -> Result<Vec<Ray>> {
    params.validate()?;
    let ts = params.symbol_period();
    let delay_span = (params.delay_span_taps - 1) as f64 * ts;
    let mut rays = Vec::with_capacity(params.n_clust * params.n_rays);
    for _ in 0..params.n_clust {
        let mean_aoa = match params.cluster_mean_aoa {
            Some(m) => m,
            None => rng.uniform(0.0, PI),
        };
        let mean_aod = match params.cluster_mean_aod {
            Some(m) => m,
            None => rng.uniform(0.0, PI),
        };
        for _ in 0..params.n_rays {
            rays.push(Ray {
                gain: rng.complex_normal(),
                delay: rng.uniform(0.0, delay_span),
                aoa: rng.laplacian(mean_aoa, params.angle_spread_std),
                aod: rng.laplacian(mean_aod, params.angle_spread_std),
            });
        }
    }
    Ok(rays)
}

/// Assemble tap matrices from an explicit ray set:
/// `H[d] = alpha * sum_rays gain * p(d*Ts - delay) * a_r(aoa) * a_t(aod)^*`
/// with `alpha = sqrt(Nt * Nr / (n_rays * n_clust))` taken from `params`.
pub fn rays_to_taps(
    rays: &[Ray],
    num_rx: usize,
    num_tx: usize,
    params: &ClusterParams,
) -> Result<ChannelTaps> {
    params.validate()?;
    if num_rx < 1 || num_tx < 1 {
        return Err(Error::InvalidArgument(
            "channel needs >= 1 antenna per side",
        ));
    }
    let d_taps = params.delay_span_taps;
    let ts = params.symbol_period();
    let alpha = libm::sqrt((num_tx * num_rx) as f64 / (params.n_clust * params.n_rays) as f64);

    let mut taps = Vec::with_capacity(d_taps);
    for _ in 0..d_taps {
        taps.push(CMat::zeros(num_rx, num_tx));
    }
    for ray in rays {
        let a_r = ula_response(num_rx, ray.aoa)?;
        let a_t = ula_response(num_tx, ray.aod)?;
        for (d, tap) in taps.iter_mut().enumerate() {
            let pulse = rrc_pulse(d as f64 * ts - ray.delay, params.rolloff, ts);
            let w = ray.gain * (alpha * pulse);
            for (j, at) in a_t.iter().enumerate() {
                let wt = w * at.conj();
                let col = tap.col_mut(j);
                for (i, ar) in a_r.iter().enumerate() {
                    col[i] += ar * wt;
                }
            }
        }
    }
    ChannelTaps::new(taps)
}

/// Random clustered frequency-selective channel realization.
pub fn gen_clustered_taps(
    params: &ClusterParams,
    num_rx: usize,
    num_tx: usize,
    rng: &mut Rng,
) -> Result<ChannelTaps> {
    let rays = draw_rays(params, rng)?;
    rays_to_taps(&rays, num_rx, num_tx, params)
}

/// Deterministic spherical-wave LOS self-interference matrix.
///
/// Entry `(n, m)` is `rho * exp(-i * 2 * pi * r) / r` with `r` the distance
/// (in wavelengths) from transmit element `m` to receive element `n`, and
/// `rho` chosen so the squared Frobenius norm equals `Nt * Nr` exactly.
pub fn gen_si_los(geometry_tx: &ArrayGeometry, geometry_rx: &ArrayGeometry) -> Result<CMat> {
    let num_tx = geometry_tx.num_elements();
    let num_rx = geometry_rx.num_elements();
    let mut los = CMat::zeros(num_rx, num_tx);
    for (m, tx) in geometry_tx.positions().iter().enumerate() {
        for (n, rx) in geometry_rx.positions().iter().enumerate() {
            let dx = tx[0] - rx[0];
            let dy = tx[1] - rx[1];
            let dz = tx[2] - rx[2];
            let r = libm::sqrt(dx * dx + dy * dy + dz * dz);
            if r <= 0.0 {
                return Err(Error::InvalidGeometry("coincident tx/rx elements"));
            }
            let phase = -2.0 * PI * r;
            los[(n, m)] = C64::new(libm::cos(phase) / r, libm::sin(phase) / r);
        }
    }
    let rho = libm::sqrt((num_tx * num_rx) as f64 / los.frob_norm_sq());
    Ok(los.scaled_re(rho))
}

/// Rician self-interference channel: scaled LOS at tap zero (the LOS
/// component is frequency-flat) plus a scaled clustered NLOS realization.
pub fn gen_si_taps(params: &SiChannelParams, rng: &mut Rng) -> Result<ChannelTaps> {
    let kappa = params.rician_kappa;
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::InvalidArgument(
            "Rician factor must be finite and >= 0",
        ));
    }
    let num_tx = params.geometry_tx.num_elements();
    let num_rx = params.geometry_rx.num_elements();
    let nlos = gen_clustered_taps(&params.nlos_params, num_rx, num_tx, rng)?;
    let nlos_weight = libm::sqrt(1.0 / (kappa + 1.0));
    let mut taps: Vec<CMat> = nlos
        .taps()
        .iter()
        .map(|t| t.scaled_re(nlos_weight))
        .collect();
    let los_weight = libm::sqrt(kappa / (kappa + 1.0));
    if los_weight > 0.0 {
        let los = gen_si_los(&params.geometry_tx, &params.geometry_rx)?;
        taps[0] = &taps[0] + &los.scaled_re(los_weight);
    }
    ChannelTaps::new(taps)
}

/// U-point DFT of the tap matrices:
/// `H[u] = sum_d taps[d] * exp(-i * 2 * pi * u * d / U)`, evaluated per
/// subcarrier by Horner's scheme in the twiddle `w_u = exp(-i * 2 * pi * u / U)`.
pub fn taps_to_subcarriers(
    taps: &ChannelTaps,
    num_subcarriers: usize,
) -> Result<SubcarrierChannels> {
    let d_taps = taps.num_taps();
    if num_subcarriers < d_taps {
        return Err(Error::InvalidArgument(
            "subcarrier count below tap count violates the cyclic-prefix assumption",
        ));
    }
    let mut subchannels = Vec::with_capacity(num_subcarriers);
    for u in 0..num_subcarriers {
        let angle = -2.0 * PI * u as f64 / num_subcarriers as f64;
        let w = C64::new(libm::cos(angle), libm::sin(angle));
        let mut acc = taps.taps()[d_taps - 1].clone();
        for d in (0..d_taps - 1).rev() {
            acc = &acc.scaled(w) + &taps.taps()[d];
        }
        subchannels.push(acc);
    }
    SubcarrierChannels::new(subchannels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn test_params(d_taps: usize) -> ClusterParams {
        ClusterParams {
            n_clust: 3,
            n_rays: 5,
            cluster_mean_aoa: None,
            cluster_mean_aod: None,
            angle_spread_std: 0.2,
            delay_span_taps: d_taps,
            sampling_rate: 2e9,
            rolloff: 1.0,
        }
    }

    #[test]
    fn ula_geometry_spacing_is_exactly_half_wavelength() {
        let geom = ArrayGeometry::ula_horizontal(32);
        for pair in geom.positions().windows(2) {
            assert_eq!(pair[1][0] - pair[0][0], 0.5);
            assert_eq!(pair[0][1], 0.0);
            assert_eq!(pair[0][2], 0.0);
        }
        assert!(ArrayGeometry::from_positions(vec![[f64::NAN, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn ula_single_element_is_one() {
        let v = ula_response(1, 1.234).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ula_broadside_has_no_phase_progression() {
        // cos(pi/2) = 0: all entries equal 1/2 for four elements.
        let v = ula_response(4, PI / 2.0).unwrap();
        for z in &v {
            assert!((z - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ula_endfire_alternates_sign() {
        // cos(0) = 1: phase step of pi.
        let v = ula_response(2, 0.0).unwrap();
        let s = 1.0 / libm::sqrt(2.0);
        assert!((v[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((v[1] - C64::new(-s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ula_unit_norm_across_sizes() {
        for n in [1usize, 2, 4, 32] {
            for angle in [0.0, 0.3, 1.1, 2.9] {
                let v = ula_response(n, angle).unwrap();
                let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                assert!((norm_sq - 1.0).abs() < 1e-12, "n={n} angle={angle}");
            }
        }
    }

    #[test]
    fn ula_rejects_non_finite_angle() {
        assert!(ula_response(4, f64::NAN).is_err());
        assert!(ula_response(4, f64::INFINITY).is_err());
    }

    #[test]
    fn rrc_zero_rolloff_is_sinc() {
        let ts = 0.5e-9;
        assert!((rrc_pulse(0.0, 0.0, ts) - 1.0).abs() < 1e-15);
        // Zero crossing at one symbol period.
        assert!(rrc_pulse(ts, 0.0, ts).abs() < 1e-15);
        assert!(rrc_pulse(3.0 * ts, 0.0, ts).abs() < 1e-12);
    }

    #[test]
    fn rrc_peak_matches_analytic_limit() {
        let ts = 0.5e-9;
        let peak = rrc_pulse(0.0, 1.0, ts);
        assert!((peak - 4.0 / PI).abs() < 1e-14);
        // Oracle: the general expression converges to that value near t = 0.
        for dt in [1e-8 * ts, -1e-8 * ts] {
            assert!((rrc_pulse(dt, 1.0, ts) - peak).abs() < 1e-6);
        }
    }

    #[test]
    fn rrc_singular_point_matches_analytic_limit() {
        let ts = 0.5e-9;
        let limit = rrc_pulse(ts / 4.0, 1.0, ts);
        // Closed form: (b/sqrt(2)) * ((1+2/pi) sin(pi/4b) + (1-2/pi) cos(pi/4b)).
        let expected = 1.0 / libm::sqrt(2.0)
            * ((1.0 + 2.0 / PI) * libm::sin(PI / 4.0) + (1.0 - 2.0 / PI) * libm::cos(PI / 4.0));
        assert!((limit - expected).abs() < 1e-14);
        // Oracle: numeric evaluation just off the singularity converges to it.
        for dt in [1e-8 * ts, -1e-8 * ts] {
            assert!((rrc_pulse(ts / 4.0 + dt, 1.0, ts) - limit).abs() < 1e-6);
        }
        // Also exercise a rolloff where the singular point is elsewhere.
        let limit_half = rrc_pulse(ts / 2.0, 0.5, ts);
        for dt in [1e-8 * ts, -1e-8 * ts] {
            assert!((rrc_pulse(ts / 2.0 + dt, 0.5, ts) - limit_half).abs() < 1e-6);
        }
    }

    #[test]
    fn rrc_is_even() {
        let ts = 1.0;
        for t in [0.1, 0.37, 0.9, 2.3] {
            assert!((rrc_pulse(t, 1.0, ts) - rrc_pulse(-t, 1.0, ts)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_ray_is_pulse_weighted_outer_product() {
        let params = ClusterParams {
            n_clust: 1,
            n_rays: 1,
            cluster_mean_aoa: Some(0.7),
            cluster_mean_aod: Some(2.1),
            ..test_params(4)
        };
        let ray = Ray {
            gain: C64::new(1.0, 0.0),
            delay: 0.0,
            aoa: 0.7,
            aod: 2.1,
        };
        let (nr, nt) = (5, 3);
        let taps = rays_to_taps(&[ray], nr, nt, &params).unwrap();
        let ts = 1.0 / params.sampling_rate;
        let alpha = libm::sqrt((nr * nt) as f64);
        let a_r = CMat::from_col(&ula_response(nr, 0.7).unwrap());
        let a_t = CMat::from_col(&ula_response(nt, 2.1).unwrap());
        let outer = &a_r * &a_t.adjoint();
        for (d, tap) in taps.taps().iter().enumerate() {
            let expected = outer.scaled_re(alpha * rrc_pulse(d as f64 * ts, 1.0, ts));
            assert!((tap - &expected).max_abs() < 1e-13, "tap {d}");
        }
        // A single ray is an outer product: rank one.
        let svd = taps.taps()[0].svd();
        assert!(svd.singular_values[1] < 1e-12 * svd.singular_values[0]);
    }

    #[test]
    fn clustered_energy_is_normalized() {
        // The leading coefficient plus the delay distribution must keep the
        // mean summed tap energy at Nt * Nr over many realizations.
        let params = test_params(8);
        let (nr, nt) = (8, 8);
        let mut rng = Rng::seed_from_u64(2024);
        let n_draws = 1000;
        let mut acc = 0.0;
        for _ in 0..n_draws {
            acc += gen_clustered_taps(&params, nr, nt, &mut rng)
                .unwrap()
                .energy();
        }
        let mean = acc / n_draws as f64;
        let target = (nr * nt) as f64;
        assert!(
            mean > 0.95 * target && mean < 1.05 * target,
            "mean energy {mean} vs target {target}"
        );
    }

    #[test]
    fn clustered_taps_deterministic_for_fixed_seed() {
        let params = test_params(6);
        let a = gen_clustered_taps(&params, 4, 4, &mut Rng::seed_from_u64(9)).unwrap();
        let b = gen_clustered_taps(&params, 4, 4, &mut Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn si_los_single_pair_has_unit_magnitude() {
        let tx = ArrayGeometry::from_positions(vec![[0.0, 0.0, 0.0]]).unwrap();
        let rx = ArrayGeometry::from_positions(vec![[0.0, 0.0, 7.3]]).unwrap();
        let los = gen_si_los(&tx, &rx).unwrap();
        assert!((los[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn si_los_frobenius_norm_is_pinned() {
        let tx = ArrayGeometry::ula_horizontal(16);
        let rx = tx.translated([0.0, 0.0, 10.0]);
        let los = gen_si_los(&tx, &rx).unwrap();
        let target = (16 * 16) as f64;
        assert!((los.frob_norm_sq() - target).abs() < 1e-10 * target);
    }

    #[test]
    fn si_los_is_deterministic() {
        let tx = ArrayGeometry::ula_horizontal(8);
        let rx = tx.translated([0.0, 0.0, 10.0]);
        assert_eq!(gen_si_los(&tx, &rx).unwrap(), gen_si_los(&tx, &rx).unwrap());
    }

    #[test]
    fn si_los_far_collinear_separation_is_near_rank_one() {
        // Two ULAs on a common axis, 1000 wavelengths apart: essentially far
        // field, so the LOS matrix collapses towards rank one.
        let tx = ArrayGeometry::ula_horizontal(32);
        let rx = tx.translated([1000.0, 0.0, 0.0]);
        let los = gen_si_los(&tx, &rx).unwrap();
        let svd = los.svd();
        let ratio = svd.singular_values[1] / svd.singular_values[0];
        assert!(ratio < 0.01, "sigma2/sigma1 = {ratio}");
    }

    #[test]
    fn si_los_rejects_coincident_elements() {
        let tx = ArrayGeometry::ula_horizontal(2);
        let rx = tx.clone();
        assert_eq!(
            gen_si_los(&tx, &rx),
            Err(Error::InvalidGeometry("coincident tx/rx elements"))
        );
    }

    fn si_params(kappa: f64) -> SiChannelParams {
        let tx = ArrayGeometry::ula_horizontal(6);
        let rx = tx.translated([0.0, 0.0, 10.0]);
        SiChannelParams {
            rician_kappa: kappa,
            nlos_params: ClusterParams {
                n_clust: 2,
                n_rays: 3,
                ..test_params(4)
            },
            geometry_tx: tx,
            geometry_rx: rx,
        }
    }

    #[test]
    fn si_taps_large_kappa_limit_is_los() {
        let params = si_params(1e12);
        let taps = gen_si_taps(&params, &mut Rng::seed_from_u64(3)).unwrap();
        let los = gen_si_los(&params.geometry_tx, &params.geometry_rx).unwrap();
        let rel = (&taps.taps()[0] - &los).frob_norm() / los.frob_norm();
        assert!(rel < 1e-5, "relative LOS error {rel}");
        for d in 1..taps.num_taps() {
            assert!(taps.taps()[d].frob_norm() < 1e-5 * los.frob_norm());
        }
    }

    #[test]
    fn si_taps_zero_kappa_is_pure_nlos() {
        let params = si_params(0.0);
        let si = gen_si_taps(&params, &mut Rng::seed_from_u64(4)).unwrap();
        let nlos =
            gen_clustered_taps(&params.nlos_params, 6, 6, &mut Rng::seed_from_u64(4)).unwrap();
        assert_eq!(si, nlos);
    }

    #[test]
    fn si_taps_energy_split_follows_kappa() {
        // kappa = 10 dB: LOS to NLOS energy 10:1 on average. The LOS part is
        // deterministic with energy exactly kappa/(kappa+1) * Nt * Nr, so
        // measure the NLOS part by subtracting it from the drawn taps.
        let kappa = 10.0;
        let params = si_params(kappa);
        let los = gen_si_los(&params.geometry_tx, &params.geometry_rx).unwrap();
        let los_part = los.scaled_re(libm::sqrt(kappa / (kappa + 1.0)));
        let los_energy = los_part.frob_norm_sq();
        let mut rng = Rng::seed_from_u64(5);
        let n_draws = 1000;
        let mut nlos_energy = 0.0;
        for _ in 0..n_draws {
            let taps = gen_si_taps(&params, &mut rng).unwrap();
            nlos_energy += (&taps.taps()[0] - &los_part).frob_norm_sq();
            for d in 1..taps.num_taps() {
                nlos_energy += taps.taps()[d].frob_norm_sq();
            }
        }
        nlos_energy /= n_draws as f64;
        let ratio = los_energy / nlos_energy;
        assert!(
            (ratio - kappa).abs() < 0.1 * kappa,
            "LOS:NLOS energy ratio {ratio}"
        );
    }

    #[test]
    fn single_tap_channel_is_frequency_flat() {
        let mut rng = Rng::seed_from_u64(6);
        let tap = CMat::from_fn(3, 2, |_, _| rng.complex_normal());
        let taps = ChannelTaps::new(vec![tap.clone()]).unwrap();
        let sub = taps_to_subcarriers(&taps, 5).unwrap();
        for h in sub.subchannels() {
            assert_eq!(h, &tap);
        }
    }

    #[test]
    fn shifted_impulse_has_linear_phase() {
        let mut rng = Rng::seed_from_u64(7);
        let m = CMat::from_fn(2, 2, |_, _| rng.complex_normal());
        let taps = ChannelTaps::new(vec![CMat::zeros(2, 2), m.clone()]).unwrap();
        let sub = taps_to_subcarriers(&taps, 4).unwrap();
        for u in 0..4 {
            let phase = -PI * u as f64 / 2.0;
            let expected = m.scaled(C64::new(libm::cos(phase), libm::sin(phase)));
            assert!((&sub.subchannels()[u] - &expected).max_abs() < 1e-15);
        }
    }

    #[test]
    fn dft_matches_naive_double_loop_oracle() {
        let mut rng = Rng::seed_from_u64(8);
        let taps = ChannelTaps::new(
            (0..3)
                .map(|_| CMat::from_fn(4, 3, |_, _| rng.complex_normal()))
                .collect(),
        )
        .unwrap();
        let u_count = 8;
        let sub = taps_to_subcarriers(&taps, u_count).unwrap();
        for u in 0..u_count {
            let mut expected = CMat::zeros(4, 3);
            for (d, tap) in taps.taps().iter().enumerate() {
                let angle = -2.0 * PI * (u * d) as f64 / u_count as f64;
                let w = C64::new(libm::cos(angle), libm::sin(angle));
                expected = &expected + &tap.scaled(w);
            }
            assert!((&sub.subchannels()[u] - &expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn dft_rejects_short_subcarrier_count() {
        let taps = ChannelTaps::new(vec![CMat::zeros(2, 2); 4]).unwrap();
        assert!(taps_to_subcarriers(&taps, 3).is_err());
    }

    #[test]
    fn dft_is_linear_in_the_taps() {
        let mut rng = Rng::seed_from_u64(10);
        let t1: Vec<CMat> = (0..3)
            .map(|_| CMat::from_fn(3, 3, |_, _| rng.complex_normal()))
            .collect();
        let t2: Vec<CMat> = (0..3)
            .map(|_| CMat::from_fn(3, 3, |_, _| rng.complex_normal()))
            .collect();
        let a = C64::new(0.8, -1.1);
        let b = C64::new(-0.4, 0.3);
        let combo: Vec<CMat> = t1
            .iter()
            .zip(t2.iter())
            .map(|(x, y)| &x.scaled(a) + &y.scaled(b))
            .collect();
        let s1 = taps_to_subcarriers(&ChannelTaps::new(t1).unwrap(), 6).unwrap();
        let s2 = taps_to_subcarriers(&ChannelTaps::new(t2).unwrap(), 6).unwrap();
        let sc = taps_to_subcarriers(&ChannelTaps::new(combo).unwrap(), 6).unwrap();
        for u in 0..6 {
            let expected = &s1.subchannels()[u].scaled(a) + &s2.subchannels()[u].scaled(b);
            assert!((&sc.subchannels()[u] - &expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn dft_satisfies_parseval() {
        let params = test_params(5);
        let mut rng = Rng::seed_from_u64(11);
        let taps = gen_clustered_taps(&params, 4, 4, &mut rng).unwrap();
        let u_count = 16;
        let sub = taps_to_subcarriers(&taps, u_count).unwrap();
        let freq_energy: f64 = sub.subchannels().iter().map(|h| h.frob_norm_sq()).sum();
        let time_energy = u_count as f64 * taps.energy();
        assert!(
            (freq_energy - time_energy).abs() < 1e-9 * time_energy,
            "{freq_energy} vs {time_energy}"
        );
    }
}
