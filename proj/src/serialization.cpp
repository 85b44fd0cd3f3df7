// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/serialization.hpp"

#include <fstream>

namespace tdinv
{

namespace
{

Json ComplexToJson(Complex z)
{
  return Json::array({z.real(), z.imag()});
}

Complex ComplexFromJson(const Json &j)
{
  Require(j.is_array() && j.size() == 2, "complex numbers are stored as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename Fn>
Json Guard(const char *what, Fn fn)
{
  try
  {
    return fn();
  }
  catch (const nlohmann::json::exception &e)
  {
    throw Error(Error::Kind::Io, std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json VectorToJson(const Vector &v)
{
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const Json &j)
{
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json ToJson(const RationalApproximant &approx)
{
  Json j;
  j["times"] = approx.channels.times;
  j["poles"] = Json::array();
  for (const auto &p : approx.poles)
  {
    j["poles"].push_back(ComplexToJson(p));
  }
  j["residues"] = Json::array();
  for (int c = 0; c < approx.ChannelCount(); c++)
  {
    Json col = Json::array();
    for (int i = 0; i < approx.PoleCount(); i++)
    {
      col.push_back(ComplexToJson(approx.residues(i, c)));
    }
    j["residues"].push_back(col);
  }
  j["interval"] = {approx.x_min, approx.x_max};
  j["fit_error"] = approx.fit_error;
  j["stats"] = {{"iterations", approx.stats.iterations},
                {"converged", approx.stats.converged},
                {"pole_relocations", approx.stats.pole_relocations},
                {"residue_solves", approx.stats.residue_solves},
                {"best_iteration", approx.stats.best_iteration}};
  return j;
}

RationalApproximant ApproximantFromJson(const Json &j)
{
  RationalApproximant a;
  try
  {
    a.channels.times = j.at("times").get<std::vector<double>>();
    for (const auto &p : j.at("poles"))
    {
      a.poles.push_back(ComplexFromJson(p));
    }
    const auto &res = j.at("residues");
    Require(static_cast<int>(res.size()) == a.ChannelCount(), "one residue list per time expected");
    a.residues.resize(a.PoleCount(), a.ChannelCount());
    for (int c = 0; c < a.ChannelCount(); c++)
    {
      Require(static_cast<int>(res[c].size()) == a.PoleCount(), "one residue per pole expected");
      for (int i = 0; i < a.PoleCount(); i++)
      {
        a.residues(i, c) = ComplexFromJson(res[c][i]);
      }
    }
    a.x_min = j.at("interval")[0].get<double>();
    a.x_max = j.at("interval")[1].get<double>();
    a.fit_error = j.at("fit_error").get<double>();
    if (j.contains("stats"))
    {
      const auto &s = j["stats"];
      a.stats.iterations = s.value("iterations", 0);
      a.stats.converged = s.value("converged", false);
      a.stats.pole_relocations = s.value("pole_relocations", 0);
      a.stats.residue_solves = s.value("residue_solves", 0);
      a.stats.best_iteration = s.value("best_iteration", 0);
    }
  }
  catch (const nlohmann::json::exception &e)
  {
    throw Error(Error::Kind::Io, std::string("malformed approximant: ") + e.what());
  }
  a.CheckInvariants();
  return a;
}

Json ToJson(const Model &model)
{
  return {{"m", VectorToJson(model.m)}, {"m_ref", VectorToJson(model.m_ref)}};
}

Model ModelFromJson(const Json &j)
{
  Model model;
  Guard("model",
        [&]
        {
          model.m = VectorFromJson(j.at("m"));
          model.m_ref = j.contains("m_ref") ? VectorFromJson(j["m_ref"]) : model.m;
          return Json();
        });
  Require(model.m.size() == model.m_ref.size(), "model and reference model differ in size");
  return model;
}

Json ToJson(const DataSet &data)
{
  Json rec = Json::array();
  for (const auto &r : data.receivers)
  {
    rec.push_back({r[0], r[1]});
  }
  return {{"d_obs", VectorToJson(data.d_obs)},
          {"sigma_d", VectorToJson(data.sigma_d)},
          {"times", data.times},
          {"receivers", rec},
          {"provenance",
           {{"true_model_hash", data.true_model_hash},
            {"seed", data.seed},
            {"eps_r", data.eps_r},
            {"eps_a", data.eps_a}}}};
}

DataSet DataSetFromJson(const Json &j)
{
  DataSet data;
  Guard("data set",
        [&]
        {
          data.d_obs = VectorFromJson(j.at("d_obs"));
          data.sigma_d = VectorFromJson(j.at("sigma_d"));
          data.times = j.at("times").get<std::vector<double>>();
          for (const auto &r : j.at("receivers"))
          {
            data.receivers.push_back({r[0].get<double>(), r.size() > 1 ? r[1].get<double>() : 0.0});
          }
          if (j.contains("provenance"))
          {
            const auto &p = j["provenance"];
            data.true_model_hash = p.value("true_model_hash", std::string());
            data.seed = p.value("seed", std::uint64_t{0});
            data.eps_r = p.value("eps_r", 0.0);
            data.eps_a = p.value("eps_a", 0.0);
          }
          return Json();
        });
  data.Validate();
  return data;
}

Json ToJson(const IterationRecord &r)
{
  return {{"iteration", r.iteration},
          {"phi", r.phi},
          {"misfit", r.misfit},
          {"reg", r.reg},
          {"chi2", r.chi2},
          {"lambda", r.lambda},
          {"eta", r.eta},
          {"accepted", r.accepted},
          {"lsqr_iters", r.lsqr_iters},
          {"line_search_trials", r.line_search_trials},
          {"phi_before", r.phi_before},
          {"grad_dot_step", r.grad_dot_step},
          {"wall_ms", r.wall_ms},
          {"factorizations", r.factorizations},
          {"solves", r.solves}};
}

Json ToJson(const InversionState &state)
{
  Json history = Json::array();
  for (const auto &r : state.history)
  {
    history.push_back(ToJson(r));
  }
  return {{"model", ToJson(state.model)},
          {"lambda", state.lambda},
          {"lambda0", state.lambda0},
          {"iteration", state.iteration},
          {"phi", state.phi},
          {"chi2", state.chi2},
          {"d_pred", VectorToJson(state.d_pred)},
          {"status", state.status},
          {"message", state.message},
          {"history", history}};
}

InversionState StateFromJson(const Json &j)
{
  InversionState s;
  Guard("inversion state",
        [&]
        {
          s.model = ModelFromJson(j.at("model"));
          s.lambda = j.at("lambda").get<double>();
          s.lambda0 = j.value("lambda0", s.lambda);
          s.iteration = j.at("iteration").get<int>();
          s.phi = j.at("phi").get<double>();
          s.chi2 = j.at("chi2").get<double>();
          s.d_pred = VectorFromJson(j.at("d_pred"));
          s.status = j.value("status", std::string());
          s.message = j.value("message", std::string());
          for (const auto &h : j.at("history"))
          {
            IterationRecord r;
            r.iteration = h.at("iteration").get<int>();
            r.phi = h.at("phi").get<double>();
            r.misfit = h.at("misfit").get<double>();
            r.reg = h.at("reg").get<double>();
            r.chi2 = h.at("chi2").get<double>();
            r.lambda = h.at("lambda").get<double>();
            r.eta = h.at("eta").get<double>();
            r.accepted = h.at("accepted").get<bool>();
            r.lsqr_iters = h.at("lsqr_iters").get<int>();
            r.line_search_trials = h.value("line_search_trials", 0);
            r.phi_before = h.value("phi_before", 0.0);
            r.grad_dot_step = h.value("grad_dot_step", 0.0);
            r.wall_ms = h.at("wall_ms").get<double>();
            r.factorizations = h.value("factorizations", 0L);
            r.solves = h.value("solves", 0L);
            s.history.push_back(r);
          }
          return Json();
        });
  return s;
}

Json ToJson(const SolveCounters &c)
{
  return {{"factorizations", c.factorizations}, {"solves", c.solves}, {"version", c.version}};
}

Json ToJson(const TaylorReport &r)
{
  return {{"h", r.h},           {"e0", r.e0},         {"e1", r.e1},       {"slope0", r.slope0},
          {"slope1", r.slope1}, {"used0", r.used0},   {"used1", r.used1}, {"floor", r.floor}};
}

void SaveJson(const Json &j, const std::string &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw Error(Error::Kind::Io, "cannot write '" + path + "'");
  }
  out << j.dump(2) << "\n";
}

Json LoadJson(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(Error::Kind::Io, "cannot read '" + path + "'");
  }
  try
  {
    return Json::parse(in);
  }
  catch (const nlohmann::json::exception &e)
  {
    throw Error(Error::Kind::Io, "invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace tdinv
