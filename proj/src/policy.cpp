#include "edgeoff/policy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace edgeoff {

NormConstants NormConstants::from_config(const ScenarioConfig& config) {
  NormConstants n;
  // best case a UE can see: every station's signal combined at target SNR
  n.rate_norm =
      config.bandwidth *
      std::log2(1.0 + config.target_snr_linear() * config.n_ues);
  n.rss_offset_dbm = config.rss_offset_dbm;
  n.rss_scale_db = config.rss_scale_db;
  n.pos_norm = config.cell_radius;
  n.f_norm = config.f_max();
  return n;
}

namespace {

void add_blocks(ParamVector& p, int m, int n_aps) {
  const int radio_dim = 3 * n_aps + 4;
  const int actions = n_aps + 1;
  p.add("enc_w", m, radio_dim);
  p.add("enc_b", m, 1);
  p.add("key_w", m, PolicyParameters::mec_dim);
  p.add("qry_w", m, PolicyParameters::mec_dim);
  p.add("val_w", m, PolicyParameters::mec_dim);
  p.add("ctx_w", m, 2 * m);
  p.add("ctx_b", m, 1);
  p.add("act1_w", 2 * m, m);
  p.add("act1_b", 2 * m, 1);
  p.add("act2_w", actions, 2 * m);
  p.add("act2_b", actions, 1);
  p.add("cri1_w", 2 * m, m);
  p.add("cri1_b", 2 * m, 1);
  p.add("cri2_w", 1, 2 * m);
  p.add("cri2_b", 1, 1);
}

struct BlockPtrs {
  const double* enc_w;
  const double* enc_b;
  const double* key_w;
  const double* qry_w;
  const double* val_w;
  const double* ctx_w;
  const double* ctx_b;
  const double* act1_w;
  const double* act1_b;
  const double* act2_w;
  const double* act2_b;
  const double* cri1_w;
  const double* cri1_b;
  const double* cri2_w;
  const double* cri2_b;
};

BlockPtrs block_ptrs(const PolicyParameters& pp) {
  const ParamVector& p = pp.params;
  auto at = [&](const char* name) { return p.values(p.block(name).offset); };
  return BlockPtrs{at("enc_w"),  at("enc_b"),  at("key_w"), at("qry_w"),
                   at("val_w"),  at("ctx_w"),  at("ctx_b"), at("act1_w"),
                   at("act1_b"), at("act2_w"), at("act2_b"), at("cri1_w"),
                   at("cri1_b"), at("cri2_w"), at("cri2_b")};
}

struct GradPtrs {
  double* enc_w;
  double* enc_b;
  double* key_w;
  double* qry_w;
  double* val_w;
  double* ctx_w;
  double* ctx_b;
  double* act1_w;
  double* act1_b;
  double* act2_w;
  double* act2_b;
  double* cri1_w;
  double* cri1_b;
  double* cri2_w;
  double* cri2_b;
};

GradPtrs grad_ptrs(PolicyParameters& pp) {
  ParamVector& p = pp.params;
  auto at = [&](const char* name) { return p.grads(p.block(name).offset); };
  return GradPtrs{at("enc_w"),  at("enc_b"),  at("key_w"), at("qry_w"),
                  at("val_w"),  at("ctx_w"),  at("ctx_b"), at("act1_w"),
                  at("act1_b"), at("act2_w"), at("act2_b"), at("cri1_w"),
                  at("cri1_b"), at("cri2_w"), at("cri2_b")};
}

void resize_zero(std::vector<double>& v, std::size_t n) {
  v.assign(n, 0.0);
}

}  // namespace

PolicyParameters PolicyParameters::create(int m, int n_aps,
                                          const NormConstants& norms,
                                          Rng& rng) {
  if (m <= 0 || n_aps <= 0)
    throw std::invalid_argument("PolicyParameters: m and n_aps must be > 0");
  PolicyParameters pp;
  pp.m = m;
  pp.n_aps = n_aps;
  pp.norms = norms;
  add_blocks(pp.params, m, n_aps);
  pp.params.init_random(rng);
  return pp;
}

void policy_forward(const PolicyParameters& pp, const double* radio_obs,
                    const double* mec_obs_all, int agent_count,
                    int receiver_idx, const std::uint8_t* mask,
                    PolicyWorkspace& ws) {
  const int m = pp.m;
  const int md = PolicyParameters::mec_dim;
  const int actions = pp.action_dim();
  const BlockPtrs b = block_ptrs(pp);

  ws.agent_count = agent_count;
  const std::size_t am = static_cast<std::size_t>(agent_count) * m;
  ws.qry.resize(am);
  ws.val.resize(am);
  ws.key_r.resize(m);
  ws.u_pre.resize(m);
  ws.u.resize(m);
  ws.scores.resize(agent_count);
  ws.alpha.resize(agent_count);
  ws.v.assign(m, 0.0);
  ws.ctx_in.resize(2 * m);
  ws.ctx_pre.resize(m);
  ws.c.resize(m);
  ws.act1_pre.resize(2 * m);
  ws.act1.resize(2 * m);
  ws.logits.resize(actions);
  ws.logp.resize(actions);
  ws.probs.resize(actions);
  ws.cri1_pre.resize(2 * m);
  ws.cri1.resize(2 * m);

  for (int l = 0; l < agent_count; ++l) {
    const double* e = mec_obs_all + static_cast<std::size_t>(l) * md;
    linear_forward(b.qry_w, nullptr, e, ws.qry.data() + l * m, m, md);
    linear_forward(b.val_w, nullptr, e, ws.val.data() + l * m, m, md);
  }
  linear_forward(b.key_w, nullptr,
                 mec_obs_all + static_cast<std::size_t>(receiver_idx) * md,
                 ws.key_r.data(), m, md);

  linear_forward(b.enc_w, b.enc_b, radio_obs, ws.u_pre.data(), m,
                 pp.radio_dim());
  relu_forward(ws.u_pre.data(), ws.u.data(), m);

  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  for (int l = 0; l < agent_count; ++l) {
    const double* q = ws.qry.data() + l * m;
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += q[j] * ws.key_r[j];
    ws.scores[l] = s * inv_sqrt_m;
  }
  masked_softmax(ws.scores.data(), nullptr, ws.alpha.data(), agent_count);

  for (int l = 0; l < agent_count; ++l) {
    const double a = ws.alpha[l];
    const double* vl = ws.val.data() + l * m;
    for (int j = 0; j < m; ++j) ws.v[j] += a * vl[j];
  }

  for (int j = 0; j < m; ++j) {
    ws.ctx_in[j] = ws.u[j];
    ws.ctx_in[m + j] = ws.v[j];
  }
  linear_forward(b.ctx_w, b.ctx_b, ws.ctx_in.data(), ws.ctx_pre.data(), m,
                 2 * m);
  relu_forward(ws.ctx_pre.data(), ws.c.data(), m);

  linear_forward(b.act1_w, b.act1_b, ws.c.data(), ws.act1_pre.data(), 2 * m,
                 m);
  relu_forward(ws.act1_pre.data(), ws.act1.data(), 2 * m);
  linear_forward(b.act2_w, b.act2_b, ws.act1.data(), ws.logits.data(), actions,
                 2 * m);

  masked_softmax(ws.logits.data(), mask, ws.probs.data(), actions);
  double hi = ws.logits[0];
  bool any = false;
  for (int i = 0; i < actions; ++i)
    if (mask[i]) {
      hi = any ? std::max(hi, ws.logits[i]) : ws.logits[i];
      any = true;
    }
  double sum = 0.0;
  for (int i = 0; i < actions; ++i)
    if (mask[i]) sum += std::exp(ws.logits[i] - hi);
  const double lse = hi + std::log(sum);
  for (int i = 0; i < actions; ++i)
    ws.logp[i] = mask[i] ? ws.logits[i] - lse : -1e30;

  linear_forward(b.cri1_w, b.cri1_b, ws.c.data(), ws.cri1_pre.data(), 2 * m,
                 m);
  relu_forward(ws.cri1_pre.data(), ws.cri1.data(), 2 * m);
  double value;
  linear_forward(b.cri2_w, b.cri2_b, ws.cri1.data(), &value, 1, 2 * m);
  ws.value = value;
}

void policy_backward(PolicyParameters& pp, const double* radio_obs,
                     const double* mec_obs_all, int agent_count,
                     int receiver_idx, const std::uint8_t* mask,
                     const PolicyWorkspace& ws, const double* d_logits,
                     double d_value, PolicyBackward& bw) {
  (void)mask;  // masked entries carry d_logits == 0 by construction
  const int m = pp.m;
  const int md = PolicyParameters::mec_dim;
  const int actions = pp.action_dim();
  const BlockPtrs b = block_ptrs(pp);
  const GradPtrs g = grad_ptrs(pp);

  resize_zero(bw.d_act1, 2 * m);
  resize_zero(bw.d_cri1, 2 * m);
  resize_zero(bw.d_c, m);
  resize_zero(bw.d_ctx_pre, m);
  resize_zero(bw.d_ctx_in, 2 * m);
  resize_zero(bw.d_u, m);
  resize_zero(bw.d_v, m);
  resize_zero(bw.d_scores, agent_count);
  resize_zero(bw.d_alpha, agent_count);
  resize_zero(bw.d_key_r, m);
  resize_zero(bw.d_qv, m);

  // actor head: logits -> act1 -> c
  linear_backward(b.act2_w, ws.act1.data(), d_logits, g.act2_w, g.act2_b,
                  bw.d_act1.data(), actions, 2 * m);
  std::vector<double>& d_act1_pre = bw.d_qv;  // reuse, zeroed below
  resize_zero(d_act1_pre, 2 * m);
  relu_backward(ws.act1_pre.data(), bw.d_act1.data(), d_act1_pre.data(),
                2 * m);
  linear_backward(b.act1_w, ws.c.data(), d_act1_pre.data(), g.act1_w, g.act1_b,
                  bw.d_c.data(), 2 * m, m);

  // critic head: value -> cri1 -> c (accumulates into the same d_c)
  if (d_value != 0.0) {
    linear_backward(b.cri2_w, ws.cri1.data(), &d_value, g.cri2_w, g.cri2_b,
                    bw.d_cri1.data(), 1, 2 * m);
    std::vector<double>& d_cri1_pre = d_act1_pre;
    resize_zero(d_cri1_pre, 2 * m);
    relu_backward(ws.cri1_pre.data(), bw.d_cri1.data(), d_cri1_pre.data(),
                  2 * m);
    linear_backward(b.cri1_w, ws.c.data(), d_cri1_pre.data(), g.cri1_w,
                    g.cri1_b, bw.d_c.data(), 2 * m, m);
  }

  // trunk
  relu_backward(ws.ctx_pre.data(), bw.d_c.data(), bw.d_ctx_pre.data(), m);
  linear_backward(b.ctx_w, ws.ctx_in.data(), bw.d_ctx_pre.data(), g.ctx_w,
                  g.ctx_b, bw.d_ctx_in.data(), m, 2 * m);
  for (int j = 0; j < m; ++j) {
    bw.d_u[j] = bw.d_ctx_in[j];
    bw.d_v[j] = bw.d_ctx_in[m + j];
  }

  // encoder
  std::vector<double>& d_u_pre = bw.d_qv;
  resize_zero(d_u_pre, m);
  relu_backward(ws.u_pre.data(), bw.d_u.data(), d_u_pre.data(), m);
  linear_backward(b.enc_w, radio_obs, d_u_pre.data(), g.enc_w, g.enc_b,
                  nullptr, m, pp.radio_dim());

  // attention: v = sum_l alpha_l * val_l
  std::vector<double>& d_buf = bw.d_qv;
  for (int l = 0; l < agent_count; ++l) {
    const double* vl = ws.val.data() + l * m;
    double da = 0.0;
    for (int j = 0; j < m; ++j) da += bw.d_v[j] * vl[j];
    bw.d_alpha[l] = da;
    const double a = ws.alpha[l];
    if (a != 0.0) {
      resize_zero(d_buf, m);
      for (int j = 0; j < m; ++j) d_buf[j] = a * bw.d_v[j];
      linear_backward(b.val_w,
                      mec_obs_all + static_cast<std::size_t>(l) * md,
                      d_buf.data(), g.val_w, nullptr, nullptr, m, md);
    }
  }

  // softmax over scores
  double dot = 0.0;
  for (int l = 0; l < agent_count; ++l) dot += ws.alpha[l] * bw.d_alpha[l];
  for (int l = 0; l < agent_count; ++l)
    bw.d_scores[l] = ws.alpha[l] * (bw.d_alpha[l] - dot);

  // scores_l = dot(qry_l, key_r) / sqrt(m)
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  for (int l = 0; l < agent_count; ++l) {
    const double s = bw.d_scores[l] * inv_sqrt_m;
    if (s == 0.0) continue;
    resize_zero(d_buf, m);
    for (int j = 0; j < m; ++j) d_buf[j] = s * ws.key_r[j];
    linear_backward(b.qry_w, mec_obs_all + static_cast<std::size_t>(l) * md,
                    d_buf.data(), g.qry_w, nullptr, nullptr, m, md);
    const double* q = ws.qry.data() + l * m;
    for (int j = 0; j < m; ++j) bw.d_key_r[j] += s * q[j];
  }
  linear_backward(b.key_w,
                  mec_obs_all + static_cast<std::size_t>(receiver_idx) * md,
                  bw.d_key_r.data(), g.key_w, nullptr, nullptr, m, md);
}

int act_from(const PolicyWorkspace& ws, ActMode mode, Rng& rng) {
  const int n = static_cast<int>(ws.probs.size());
  if (mode == ActMode::greedy) {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (ws.probs[i] > ws.probs[best]) best = i;
    return best;
  }
  const double u = rng.uniform();
  double cum = 0.0;
  int last_valid = 0;
  for (int i = 0; i < n; ++i) {
    if (ws.probs[i] <= 0.0) continue;
    last_valid = i;
    cum += ws.probs[i];
    if (u < cum) return i;
  }
  return last_valid;  // u landed in the rounding tail
}

void PolicyParameters::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << "edgeoff-policy-checkpoint v1\n";
  out << "m " << m << "\n";
  out << "n_aps " << n_aps << "\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "norm rate_norm " << num(norms.rate_norm) << "\n";
  out << "norm rss_offset_dbm " << num(norms.rss_offset_dbm) << "\n";
  out << "norm rss_scale_db " << num(norms.rss_scale_db) << "\n";
  out << "norm pos_norm " << num(norms.pos_norm) << "\n";
  out << "norm f_norm " << num(norms.f_norm) << "\n";
  out << "blocks " << params.blocks().size() << "\n";
  for (const ParamBlock& blk : params.blocks()) {
    out << "block " << blk.name << " " << blk.rows << " " << blk.cols << "\n";
    const double* v = params.values(blk.offset);
    for (int r = 0; r < blk.rows; ++r) {
      for (int c = 0; c < blk.cols; ++c) {
        if (c) out << ' ';
        out << num(v[static_cast<std::size_t>(r) * blk.cols + c]);
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

PolicyParameters PolicyParameters::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "edgeoff-policy-checkpoint v1")
    throw std::runtime_error("bad checkpoint header in " + path);

  auto expect_key = [&](const std::string& key) {
    std::string word;
    if (!(in >> word) || word != key)
      throw std::runtime_error("checkpoint: expected '" + key + "' in " +
                               path);
  };

  PolicyParameters pp;
  expect_key("m");
  in >> pp.m;
  expect_key("n_aps");
  in >> pp.n_aps;
  if (!in || pp.m <= 0 || pp.n_aps <= 0)
    throw std::runtime_error("checkpoint: bad dimensions in " + path);

  auto read_norm = [&](const std::string& name, double& slot) {
    expect_key("norm");
    std::string word;
    in >> word;
    if (word != name)
      throw std::runtime_error("checkpoint: expected norm " + name + " in " +
                               path);
    in >> slot;
  };
  read_norm("rate_norm", pp.norms.rate_norm);
  read_norm("rss_offset_dbm", pp.norms.rss_offset_dbm);
  read_norm("rss_scale_db", pp.norms.rss_scale_db);
  read_norm("pos_norm", pp.norms.pos_norm);
  read_norm("f_norm", pp.norms.f_norm);

  add_blocks(pp.params, pp.m, pp.n_aps);

  expect_key("blocks");
  std::size_t count = 0;
  in >> count;
  if (!in || count != pp.params.blocks().size())
    throw std::runtime_error("checkpoint: unexpected block count in " + path);
  for (std::size_t i = 0; i < count; ++i) {
    expect_key("block");
    std::string name;
    int rows = 0, cols = 0;
    in >> name >> rows >> cols;
    const ParamBlock& blk = pp.params.block(name);  // throws on unknown name
    if (rows != blk.rows || cols != blk.cols)
      throw std::runtime_error("checkpoint: shape mismatch for block " + name +
                               " in " + path);
    double* v = pp.params.values(blk.offset);
    for (std::size_t j = 0; j < blk.size(); ++j)
      if (!(in >> v[j]))
        throw std::runtime_error("checkpoint: truncated block " + name +
                                 " in " + path);
  }
  return pp;
}

void build_radio_observation(int k, const ObsMemory& mem,
                             const SlotRadioContext& radio,
                             const Deployment& dep, const NormConstants& norms,
                             double* out, int n_aps) {
  const int actions = n_aps + 1;
  for (int i = 0; i < actions; ++i) out[i] = 0.0;
  out[mem.prev_action[k]] = 1.0;
  out[actions + 0] = mem.prev_rate[k] / norms.rate_norm;
  out[actions + 1] = mem.prev_sum_rate / norms.rate_norm;
  out[actions + 2] = mem.prev_ack[k] ? 1.0 : 0.0;

  double* rss = out + actions + 3;
  double* aoa = rss + n_aps;
  for (int n = 0; n < n_aps; ++n) {
    rss[n] = -1.0;
    aoa[n] = -1.0;
  }
  const Vec2& ue = dep.ue_positions[k];
  for (int n : dep.candidate_sets[k]) {
    const double w = radio.rss_at(k, n);
    const double dbm = 10.0 * std::log10(w * 1000.0);
    rss[n] = (dbm - norms.rss_offset_dbm) / norms.rss_scale_db;
    const Vec2& ap = dep.ap_positions[n];
    aoa[n] = std::atan2(ap.y - ue.y, ap.x - ue.x) / 3.14159265358979323846;
  }
}

void build_mec_observation(int k, const QueueSet& queues, const ObsMemory& mem,
                           const Deployment& dep, const NormConstants& norms,
                           double* out6) {
  out6[0] = dep.ue_positions[k].x / norms.pos_norm;
  out6[1] = dep.ue_positions[k].y / norms.pos_norm;
  out6[2] = mem.prev_share[k] / norms.f_norm;
  const double qc = queues.q_clip[k];
  const double zc = queues.z_clip[k];
  out6[3] = qc > 0.0 ? static_cast<double>(queues.q_local[k]) / qc : 0.0;
  out6[4] = qc > 0.0 ? static_cast<double>(queues.q_server[k]) / qc : 0.0;
  out6[5] = zc > 0.0 ? queues.z[k] / zc : 0.0;
}

void build_action_mask(int k, const Deployment& dep, int n_aps,
                       std::uint8_t* mask) {
  for (int i = 0; i <= n_aps; ++i) mask[i] = 0;
  mask[0] = 1;
  for (int n : dep.candidate_sets[k]) mask[1 + n] = 1;
}

std::vector<int> neighborhood_of(int k, const Deployment& dep, double radius) {
  const int n_ues = static_cast<int>(dep.ue_positions.size());
  std::vector<int> out;
  if (radius <= 0.0) {
    out.resize(n_ues);
    for (int i = 0; i < n_ues; ++i) out[i] = i;
    return out;
  }
  for (int i = 0; i < n_ues; ++i)
    if (i == k || distance(dep.ue_positions[i], dep.ue_positions[k]) <= radius)
      out.push_back(i);
  return out;
}

}  // namespace edgeoff
