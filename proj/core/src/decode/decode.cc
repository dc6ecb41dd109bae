#include "selfgen/decode/decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t ArgMax(const Vec& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void Finish(const Seq2SeqModel& model, DecodedSample* s) {
  const std::size_t eos = model.output_vocab().eos();
  s->tokens.clear();
  for (std::size_t id : s->ids) {
    if (id == eos) break;
    s->tokens.push_back(model.output_vocab().Token(id));
  }
  s->terminated = !s->ids.empty() && s->ids.back() == eos;
  const double sum =
      std::accumulate(s->token_logprobs.begin(), s->token_logprobs.end(), 0.0);
  s->avg_ll = s->token_logprobs.empty() ? 0.0 : sum / s->token_logprobs.size();
}

// Clean-model log-probabilities of a fixed id sequence.
std::vector<double> Rescore(const Seq2SeqModel& model, const EncoderOutput& enc,
                            const std::vector<std::size_t>& ids) {
  DecoderState state = model.InitialState(enc);
  std::size_t prev = model.output_vocab().bos();
  std::vector<double> lps;
  for (std::size_t id : ids) {
    StepOutput step = model.DecoderStep(prev, state, enc);
    lps.push_back(DecodeLogProbs(model, step.logits)[id]);
    state = std::move(step.next);
    prev = id;
  }
  return lps;
}

}  // namespace

std::string DecodedSample::Surface() const { return Detokenize(tokens); }

Vec DecodeLogProbs(const Seq2SeqModel& model, std::span<const double> logits) {
  Vec masked(logits.begin(), logits.end());
  masked[model.output_vocab().pad()] = kNegInf;
  masked[model.output_vocab().bos()] = kNegInf;
  double mx = kNegInf;
  for (double l : masked) mx = std::max(mx, l);
  double z = 0.0;
  for (double l : masked) z += l == kNegInf ? 0.0 : std::exp(l - mx);
  const double lz = std::log(z);
  for (double& l : masked) l = l == kNegInf ? kNegInf : l - mx - lz;
  return masked;
}

DecodedSample Greedy(const Seq2SeqModel& model, const LinearizedInput& input) {
  const EncoderOutput enc = model.Encode(input);
  DecoderState state = model.InitialState(enc);
  std::size_t prev = model.output_vocab().bos();
  const std::size_t eos = model.output_vocab().eos();
  DecodedSample s;
  for (std::size_t t = 0; t < model.config().max_decode_length; ++t) {
    StepOutput step = model.DecoderStep(prev, state, enc);
    const Vec lp = DecodeLogProbs(model, step.logits);
    const std::size_t tok = ArgMax(lp);
    s.ids.push_back(tok);
    s.token_logprobs.push_back(lp[tok]);
    state = std::move(step.next);
    prev = tok;
    if (tok == eos) break;
  }
  Finish(model, &s);
  return s;
}

std::vector<DecodedSample> Beam(const Seq2SeqModel& model, const LinearizedInput& input,
                                std::size_t width) {
  if (width == 0) throw ContractError("beam width must be >= 1");
  const EncoderOutput enc = model.Encode(input);
  const std::size_t eos = model.output_vocab().eos();

  struct Hyp {
    std::vector<std::size_t> ids;
    std::vector<double> lps;
    double sum = 0.0;
    DecoderState state;
  };
  struct Candidate {
    std::size_t parent;
    std::size_t token;
    double sum;
  };

  std::vector<Hyp> active{Hyp{{}, {}, 0.0, model.InitialState(enc)}};
  std::vector<DecodedSample> finished;
  for (std::size_t t = 0; t < model.config().max_decode_length && !active.empty(); ++t) {
    std::vector<Candidate> cands;
    std::vector<StepOutput> steps;
    std::vector<Vec> lps;
    for (std::size_t h = 0; h < active.size(); ++h) {
      const std::size_t prev =
          active[h].ids.empty() ? model.output_vocab().bos() : active[h].ids.back();
      steps.push_back(model.DecoderStep(prev, active[h].state, enc));
      lps.push_back(DecodeLogProbs(model, steps.back().logits));
      for (std::size_t v = 0; v < lps.back().size(); ++v) {
        if (lps.back()[v] == kNegInf) continue;
        cands.push_back({h, v, active[h].sum + lps.back()[v]});
      }
    }
    // All candidates share length t+1, so sum order is average order.
    const std::size_t keep = std::min(width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.sum != b.sum) return a.sum > b.sum;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Hyp> next;
    for (std::size_t c = 0; c < keep; ++c) {
      const Candidate& cand = cands[c];
      Hyp h;
      h.ids = active[cand.parent].ids;
      h.ids.push_back(cand.token);
      h.lps = active[cand.parent].lps;
      h.lps.push_back(lps[cand.parent][cand.token]);
      h.sum = cand.sum;
      if (cand.token == eos) {
        DecodedSample s;
        s.ids = std::move(h.ids);
        s.token_logprobs = std::move(h.lps);
        Finish(model, &s);
        finished.push_back(std::move(s));
      } else {
        h.state = steps[cand.parent].next;
        next.push_back(std::move(h));
      }
    }
    active = std::move(next);
  }
  for (Hyp& h : active) {  // cut by the length cap
    DecodedSample s;
    s.ids = std::move(h.ids);
    s.token_logprobs = std::move(h.lps);
    Finish(model, &s);
    finished.push_back(std::move(s));
  }
  std::stable_sort(finished.begin(), finished.end(),
                   [](const DecodedSample& a, const DecodedSample& b) {
                     return a.avg_ll > b.avg_ll;
                   });
  if (finished.size() > width) finished.resize(width);
  return finished;
}

DecodedSample AncestralSample(const Seq2SeqModel& model, const LinearizedInput& input,
                              double temperature, RngStream& rng) {
  if (!(temperature > 0.0)) throw ContractError("temperature must be > 0");
  if (temperature < 1e-6) return Greedy(model, input);
  const EncoderOutput enc = model.Encode(input);
  DecoderState state = model.InitialState(enc);
  std::size_t prev = model.output_vocab().bos();
  const std::size_t eos = model.output_vocab().eos();
  DecodedSample s;
  for (std::size_t t = 0; t < model.config().max_decode_length; ++t) {
    StepOutput step = model.DecoderStep(prev, state, enc);
    Vec scaled = step.logits;
    for (double& l : scaled) l /= temperature;
    const Vec lp = DecodeLogProbs(model, scaled);
    const double u = rng.Uniform();
    double cum = 0.0;
    std::size_t tok = lp.size();
    std::size_t last_valid = 0;
    for (std::size_t v = 0; v < lp.size(); ++v) {
      if (lp[v] == kNegInf) continue;
      last_valid = v;
      cum += std::exp(lp[v]);
      if (u < cum) {
        tok = v;
        break;
      }
    }
    if (tok == lp.size()) tok = last_valid;  // rounding slack at the top end
    s.ids.push_back(tok);
    s.token_logprobs.push_back(lp[tok]);
    state = std::move(step.next);
    prev = tok;
    if (tok == eos) break;
  }
  Finish(model, &s);
  return s;
}

Vec DrawNoise(double sigma0, std::size_t step, std::size_t dim, RngStream& rng) {
  if (step == 0) throw ContractError("noise steps are 1-based");
  if (sigma0 < 0.0) throw ContractError("sigma0 must be >= 0");
  const double sd = sigma0 / std::sqrt(static_cast<double>(step));
  Vec eps(dim);
  for (double& e : eps) e = sd * rng.Normal();
  return eps;
}

DecodedSample NoiseInjectSample(const Seq2SeqModel& model, const LinearizedInput& input,
                                const NoiseSpec& spec, RngStream& rng) {
  if (spec.sigma0 < 0.0) throw ContractError("sigma0 must be >= 0");
  const EncoderOutput enc = model.Encode(input);
  DecoderState state = model.InitialState(enc);
  std::size_t prev = model.output_vocab().bos();
  const std::size_t eos = model.output_vocab().eos();
  const std::size_t dim = model.config().hidden_dim;
  DecodedSample s;
  for (std::size_t t = 0; t < model.config().max_decode_length; ++t) {
    StepOutput step;
    if (spec.sigma0 > 0.0) {
      const Vec eps = DrawNoise(spec.sigma0, t + 1, dim, rng);
      step = model.DecoderStep(prev, state, enc, &eps);
    } else {
      step = model.DecoderStep(prev, state, enc);
    }
    const Vec lp = DecodeLogProbs(model, step.logits);
    const std::size_t tok = ArgMax(lp);
    s.ids.push_back(tok);
    s.token_logprobs.push_back(lp[tok]);
    state = std::move(step.next);
    prev = tok;
    if (tok == eos) break;
  }
  if (spec.rescore_clean) s.token_logprobs = Rescore(model, enc, s.ids);
  Finish(model, &s);
  return s;
}

bool SeenSet::Insert(const std::string& surface) {
  std::lock_guard<std::mutex> lock(mu_);
  return keys_.insert(surface).second;
}

bool SeenSet::Contains(const std::string& surface) const {
  std::lock_guard<std::mutex> lock(mu_);
  return keys_.count(surface) > 0;
}

std::size_t SeenSet::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return keys_.size();
}

SampleBatch SampleBatchTopK(const Seq2SeqModel& model, const LinearizedInput& input,
                            const NoiseSpec& spec, std::uint64_t seed, std::size_t n,
                            std::size_t k, SeenSet& seen, std::size_t workers) {
  if (n == 0 || k == 0) throw ContractError("sample batch needs n >= 1 and k >= 1");
  SampleBatch batch;
  batch.draws.resize(n);
  auto draw = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < n; i += stride) {
      RngStream rng(seed, i);
      batch.draws[i] = NoiseInjectSample(model, input, spec, rng);
      batch.draws[i].sample_index = i;
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    draw(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(draw, w, workers);
    for (std::thread& t : pool) t.join();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return batch.draws[a].avg_ll > batch.draws[b].avg_ll;
  });
  batch.retained_topk = std::min(k, n);
  for (std::size_t r = 0; r < batch.retained_topk; ++r) {
    const DecodedSample& s = batch.draws[order[r]];
    if (seen.Insert(s.Surface())) {
      batch.kept.push_back(s);
    } else {
      ++batch.deduped;
    }
  }
  return batch;
}

std::string SampleDumpLine(const std::string& mr, const std::string& text,
                           const DecodedSample& sample, double sigma0,
                           std::uint64_t seed) {
  nlohmann::json j;
  j["mr"] = mr;
  j["text"] = text;
  j["avg_ll"] = sample.avg_ll;
  j["sigma0"] = sigma0;
  j["seed"] = seed;
  j["sample_index"] = sample.sample_index;
  return j.dump();
}

}  // namespace selfgen
