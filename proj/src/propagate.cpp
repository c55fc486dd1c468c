// Copyright 2026 The pgnc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pgnc/propagate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pgnc {

namespace {

const char* kChannelNames[7] = {"omega_x1", "omega_y1", "omega_x2", "omega_y2",
                                "delta_1", "delta_2", "j_zz"};

double rate_or_zero(double time_constant) {
  return std::isinf(time_constant) ? 0.0 : 1.0 / time_constant;
}

}  // namespace

LindbladPropagator::LindbladPropagator(const DeviceModel& model,
                                       const CrosstalkParams& xtalk)
    : model_(model), xtalk_(xtalk), ops_(build_operators(model)), dim_(model.dim()) {
  model_.validate();
  xtalk_.validate();
  const int nl = model_.n_levels;
  const double g1 = rate_or_zero(model_.t1_1);
  const double g2 = rate_or_zero(model_.t1_2);
  const double gp1 = dephasing_rate(model_.t1_1, model_.t2_1);
  const double gp2 = dephasing_rate(model_.t1_2, model_.t2_2);

  // Diagonal of Gamma = sum_k L_k^+ L_k in the number basis.
  RVector gamma_diag(dim_);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      gamma_diag(nl * i + j) = g1 * i + g2 * j + gp1 * i * i + gp2 * j * j;

  // Entrywise coefficients covering both dephasing sandwiches and the
  // anticommutator: n1 rho n1 and n2 rho n2 scale entry (x, y) by i*k and
  // j*l, the anticommutator subtracts (gamma[x] + gamma[y]) / 2.
  wdiag_.resize(dim_, dim_);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      for (int k = 0; k < nl; ++k)
        for (int l = 0; l < nl; ++l) {
          const int x = nl * i + j;
          const int y = nl * k + l;
          wdiag_(x, y) = gp1 * i * k + gp2 * j * l -
                         0.5 * (gamma_diag(x) + gamma_diag(y));
        }

  // Amplitude-damping sandwiches b rho b^+ read from one excitation higher;
  // the Heisenberg-direction versions b^+ y b read from one lower.
  auto lin = [nl](int i, int j) { return nl * i + j; };
  auto push = [&](std::vector<ShiftOp>& v, int xi, int xj, int yi, int yj,
                  int si, int sj, int ri, int rj, double w) {
    v.push_back({lin(xi, xj) + dim_ * lin(yi, yj),
                 lin(si, sj) + dim_ * lin(ri, rj), w});
  };
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      for (int k = 0; k < nl; ++k)
        for (int l = 0; l < nl; ++l) {
          if (g1 > 0.0 && i + 1 < nl && k + 1 < nl)
            push(shifts_fwd_, i, j, k, l, i + 1, j, k + 1, l,
                 g1 * std::sqrt(double((i + 1) * (k + 1))));
          if (g2 > 0.0 && j + 1 < nl && l + 1 < nl)
            push(shifts_fwd_, i, j, k, l, i, j + 1, k, l + 1,
                 g2 * std::sqrt(double((j + 1) * (l + 1))));
          if (g1 > 0.0 && i >= 1 && k >= 1)
            push(shifts_adj_, i, j, k, l, i - 1, j, k - 1, l,
                 g1 * std::sqrt(double(i * k)));
          if (g2 > 0.0 && j >= 1 && l >= 1)
            push(shifts_adj_, i, j, k, l, i, j - 1, k, l - 1,
                 g2 * std::sqrt(double(j * l)));
        }

  gen_entries_.resize(7);
  for (int a = 0; a < 7; ++a) {
    const CMatrix& g = ops_.channel_generator(a);
    for (int y = 0; y < dim_; ++y)
      for (int x = 0; x < dim_; ++x)
        if (g(x, y) != Complex(0.0, 0.0))
          gen_entries_[a].push_back({x + dim_ * y, g(x, y)});
  }
}

void LindbladPropagator::apply_rhs_block(const Complex* a, const Complex* r,
                                         Complex* out, double comm_sign,
                                         const std::vector<ShiftOp>& shifts) const {
  const int d = dim_;
  // comm_sign * i * (A - A^+) with A = H * block; writing both triangles from
  // the same products keeps the result Hermitian to the bit.
  for (int y = 0; y < d; ++y) {
    for (int x = 0; x < d; ++x) {
      const Complex diff = a[x + d * y] - std::conj(a[y + d * x]);
      out[x + d * y] = Complex(-comm_sign * diff.imag(), comm_sign * diff.real());
    }
  }
  const double* w = wdiag_.data();
  for (int p = 0; p < d * d; ++p) out[p] += w[p] * r[p];
  for (const ShiftOp& s : shifts) out[s.dst] += s.w * r[s.src];
}

void LindbladPropagator::apply_rhs_stack(const CMatrix& h, const CStack& r,
                                         CStack& out, CStack& scratch,
                                         double comm_sign,
                                         const std::vector<ShiftOp>& shifts) const {
  scratch.noalias() = h * r;
  const int blocks = static_cast<int>(r.cols()) / dim_;
  const int stride = dim_ * dim_;
  for (int m = 0; m < blocks; ++m)
    apply_rhs_block(scratch.data() + m * stride, r.data() + m * stride,
                    out.data() + m * stride, comm_sign, shifts);
}

CMatrix LindbladPropagator::rhs(const CMatrix& rho, const CMatrix& h) const {
  CStack r = rho, out = rho, scratch = rho;
  apply_rhs_stack(h, r, out, scratch, -1.0, shifts_fwd_);
  return out;
}

CMatrix LindbladPropagator::step_base_hamiltonian(
    const EffectiveControlMap& map, const Vector<double, 7>& u_col) const {
  const Vector<double, 7> v = map.lin * u_col + map.offset;
  CMatrix h = ops_.h0;
  for (int a = 0; a < 7; ++a)
    for (const GenEntry& e : gen_entries_[a]) h.data()[e.pos] += v(a) * e.w;
  return h;
}

void LindbladPropagator::propagate_stack(CStack& rho, const WaveformGrid& wave,
                                         const ConditionVector& c, int substeps,
                                         std::vector<CStack>* checkpoints) const {
  if (substeps < 1)
    throw std::invalid_argument("propagate: substeps must be >= 1");
  if (wave.n_steps() != model_.n_steps)
    throw std::invalid_argument("propagate: waveform grid has " +
                                std::to_string(wave.n_steps()) +
                                " steps, device expects " +
                                std::to_string(model_.n_steps));
  for (int k = 0; k < wave.n_steps(); ++k)
    for (int ch = 0; ch < 7; ++ch)
      if (!std::isfinite(wave.u(ch, k)))
        throw std::runtime_error("propagate: non-finite control sample at step " +
                                 std::to_string(k) + ", channel " +
                                 std::string(kChannelNames[ch]));

  const EffectiveControlMap map(xtalk_, c);
  const bool has_bleed = map.bleed_amp.cwiseAbs().maxCoeff() > 0.0;
  CMatrix h_bleed = CMatrix::Zero(dim_, dim_);
  if (has_bleed)
    for (int a = 0; a < 4; ++a)
      for (const GenEntry& e : gen_entries_[a])
        h_bleed.data()[e.pos] += map.bleed_amp(a) * e.w;

  const int n = wave.n_steps();
  const double dt = model_.dt();
  const double h_sub = dt / substeps;
  if (checkpoints) checkpoints->assign(n + 1, CStack());

  CStack k1 = rho, k2 = rho, k3 = rho, k4 = rho, stage = rho, scratch = rho;
  CMatrix h_stage(dim_, dim_);
  for (int k = 0; k < n; ++k) {
    if (checkpoints) (*checkpoints)[k] = rho;
    const CMatrix h_base = step_base_hamiltonian(map, wave.u.col(k));
    const double t0 = k * dt;
    for (int j = 0; j < substeps; ++j) {
      const double t = t0 + j * h_sub;
      auto h_at = [&](double tau) -> const CMatrix& {
        if (!has_bleed) return h_base;
        h_stage = h_base;
        h_stage += map.bleed_scale(
                       tau, flattop_env(tau, wave.gate_time, wave.env_steepness)) *
                   h_bleed;
        return h_stage;
      };
      apply_rhs_stack(h_at(t), rho, k1, scratch, -1.0, shifts_fwd_);
      stage = rho + (0.5 * h_sub) * k1;
      apply_rhs_stack(h_at(t + 0.5 * h_sub), stage, k2, scratch, -1.0, shifts_fwd_);
      stage = rho + (0.5 * h_sub) * k2;
      apply_rhs_stack(h_at(t + 0.5 * h_sub), stage, k3, scratch, -1.0, shifts_fwd_);
      stage = rho + h_sub * k3;
      apply_rhs_stack(h_at(t + h_sub), stage, k4, scratch, -1.0, shifts_fwd_);
      rho += (h_sub / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!rho.allFinite())
      throw std::runtime_error("propagate: non-finite state after step " +
                               std::to_string(k));
  }
  if (checkpoints) (*checkpoints)[n] = rho;
}

void LindbladPropagator::backprop_stack(const std::vector<CStack>& checkpoints,
                                        CStack& ybar, const WaveformGrid& wave,
                                        const ConditionVector& c, int substeps,
                                        Matrix<double, 7, Eigen::Dynamic>& ubar) const {
  const int n = wave.n_steps();
  if (static_cast<int>(checkpoints.size()) != n + 1)
    throw std::invalid_argument("backprop: checkpoint count mismatch");
  const EffectiveControlMap map(xtalk_, c);
  const bool has_bleed = map.bleed_amp.cwiseAbs().maxCoeff() > 0.0;
  CMatrix h_bleed = CMatrix::Zero(dim_, dim_);
  if (has_bleed)
    for (int a = 0; a < 4; ++a)
      for (const GenEntry& e : gen_entries_[a])
        h_bleed.data()[e.pos] += map.bleed_amp(a) * e.w;

  const double dt = model_.dt();
  const double h_sub = dt / substeps;
  const int blocks = static_cast<int>(ybar.cols()) / dim_;
  const int stride = dim_ * dim_;
  ubar.setZero(7, n);

  // Stage inputs recomputed per control step from its checkpoint.
  struct StageRecord {
    CStack r1, r2, r3, r4;
  };
  std::vector<StageRecord> rec(substeps);
  CStack k1 = ybar, k2 = ybar, k3 = ybar, k4 = ybar, scratch = ybar;
  CStack kb4 = ybar, kb3 = ybar, kb2 = ybar, kb1 = ybar;
  CStack rb4 = ybar, rb3 = ybar, rb2 = ybar;
  CMatrix h_stage(dim_, dim_);
  CMatrix q(dim_, dim_);

  // d(loss)/d(v_a) for one stage: Im Tr(G_a [rho, ybar]) summed over states.
  auto accumulate_coeff_vjp = [&](const CStack& kbar, const CStack& rstage,
                                  Vector<double, 7>& vbar) {
    q.setZero();
    for (int m = 0; m < blocks; ++m) {
      const auto rho_m = rstage.middleCols(m * dim_, dim_);
      const auto y_m = kbar.middleCols(m * dim_, dim_);
      // ybar blocks stay Hermitian along the sweep, so [rho, y^+] = P - P^+
      // with P = rho * y.
      q.noalias() += rho_m * y_m;
    }
    for (int a = 0; a < 7; ++a) {
      double acc = 0.0;
      for (const GenEntry& e : gen_entries_[a]) {
        const int x = e.pos % dim_;
        const int y = e.pos / dim_;
        const Complex qc = q(y, x) - std::conj(q(x, y));  // [rho, y] at (y, x)
        acc += e.w.real() * qc.imag() + e.w.imag() * qc.real();
      }
      vbar(a) += acc;
    }
  };

  for (int k = n - 1; k >= 0; --k) {
    const CMatrix h_base = step_base_hamiltonian(map, wave.u.col(k));
    const double t0 = k * dt;
    auto h_at = [&](double tau) -> const CMatrix& {
      if (!has_bleed) return h_base;
      h_stage = h_base;
      h_stage += map.bleed_scale(
                     tau, flattop_env(tau, wave.gate_time, wave.env_steepness)) *
                 h_bleed;
      return h_stage;
    };

    // Forward replay within the step.
    CStack r = checkpoints[k];
    for (int j = 0; j < substeps; ++j) {
      const double t = t0 + j * h_sub;
      rec[j].r1 = r;
      apply_rhs_stack(h_at(t), r, k1, scratch, -1.0, shifts_fwd_);
      rec[j].r2 = r + (0.5 * h_sub) * k1;
      apply_rhs_stack(h_at(t + 0.5 * h_sub), rec[j].r2, k2, scratch, -1.0, shifts_fwd_);
      rec[j].r3 = r + (0.5 * h_sub) * k2;
      apply_rhs_stack(h_at(t + 0.5 * h_sub), rec[j].r3, k3, scratch, -1.0, shifts_fwd_);
      rec[j].r4 = r + h_sub * k3;
      apply_rhs_stack(h_at(t + h_sub), rec[j].r4, k4, scratch, -1.0, shifts_fwd_);
      r += (h_sub / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // Adjoint sweep over the sub-steps in reverse.
    Vector<double, 7> vbar = Vector<double, 7>::Zero();
    for (int j = substeps - 1; j >= 0; --j) {
      const double t = t0 + j * h_sub;
      kb4 = (h_sub / 6.0) * ybar;
      apply_rhs_stack(h_at(t + h_sub), kb4, rb4, scratch, 1.0, shifts_adj_);
      accumulate_coeff_vjp(kb4, rec[j].r4, vbar);

      kb3 = (h_sub / 3.0) * ybar + h_sub * rb4;
      apply_rhs_stack(h_at(t + 0.5 * h_sub), kb3, rb3, scratch, 1.0, shifts_adj_);
      accumulate_coeff_vjp(kb3, rec[j].r3, vbar);

      kb2 = (h_sub / 3.0) * ybar + (0.5 * h_sub) * rb3;
      apply_rhs_stack(h_at(t + 0.5 * h_sub), kb2, rb2, scratch, 1.0, shifts_adj_);
      accumulate_coeff_vjp(kb2, rec[j].r2, vbar);

      kb1 = (h_sub / 6.0) * ybar + (0.5 * h_sub) * rb2;
      apply_rhs_stack(h_at(t), kb1, kb4, scratch, 1.0, shifts_adj_);  // kb4 reused
      accumulate_coeff_vjp(kb1, rec[j].r1, vbar);

      ybar += rb4 + rb3 + rb2 + kb4;
    }
    ubar.col(k) = map.lin.transpose() * vbar;
  }
}

QuantumState propagate(const QuantumState& rho0, const WaveformGrid& waveforms,
                       const ConditionVector& condition, const DeviceModel& model,
                       const CrosstalkParams& xtalk, int substeps) {
  rho0.validate();
  const LindbladPropagator engine(model, xtalk);
  CStack stack = rho0.rho;
  engine.propagate_stack(stack, waveforms, condition, substeps);
  QuantumState out;
  out.rho = std::move(stack);
  return out;
}

}  // namespace pgnc
