#include "sunforest/trace_expand.hpp"

#include "sunforest/assembler.hpp"
#include "sunforest/factors.hpp"
#include "sunforest/rules.hpp"

namespace sunforest {

namespace {

struct ExpandCtx {
  std::string prefix;
  int fresh = 0;
  std::string dummy() { return prefix + std::to_string(fresh++); }
};

void add_assembled(Expression& out, const std::vector<TensorFactor>& acc, Coefficient c) {
  auto [diag, loops] = assemble_factors(acc);
  for (int i = 0; i < loops; ++i) c = c * atomic_constants().delta_loop;
  out.add(diag, c);
}

void expand_rec(const std::vector<std::string>& word, const Coefficient& pref,
                std::vector<TensorFactor> acc, ExpandCtx& ctx, Expression& out) {
  if (word.empty()) {
    add_assembled(out, acc, pref * Coefficient::monomial(1, GaussianRational(1)));  // Tr(1) = N
    return;
  }
  if (word.size() == 1) return;  // traceless generators
  if (word.size() == 2) {
    acc.push_back({TensorFactor::Type::Delta, {word[0], word[1]}});
    add_assembled(out, acc, pref * Coefficient::of(2));
    return;
  }
  std::vector<std::string> rest(word.begin() + 2, word.end());
  {
    auto acc2 = acc;
    acc2.push_back({TensorFactor::Type::Delta, {word[0], word[1]}});
    expand_rec(rest, pref * Coefficient::monomial(-1, GaussianRational(2)), std::move(acc2), ctx,
               out);
  }
  std::string k = ctx.dummy();
  std::vector<std::string> next;
  next.push_back(k);
  next.insert(next.end(), rest.begin(), rest.end());
  {
    auto acc2 = acc;
    acc2.push_back({TensorFactor::Type::D, {word[0], word[1], k}});
    expand_rec(next, pref, std::move(acc2), ctx, out);
  }
  {
    auto acc2 = acc;
    acc2.push_back({TensorFactor::Type::F, {word[0], word[1], k}});
    expand_rec(next, pref * Coefficient::imaginary(), std::move(acc2), ctx, out);
  }
}

}  // namespace

Expression expand_trace(const TraceWord& w) {
  if (w.kind != TraceWord::Kind::Fundamental)
    throw std::invalid_argument("expand_trace handles fundamental words only");
  ExpandCtx ctx;
  ctx.prefix = "k_";
  for (bool clash = true; clash;) {
    clash = false;
    for (auto& idx : w.indices)
      if (idx.rfind(ctx.prefix, 0) == 0) {
        ctx.prefix += "k";
        clash = true;
      }
  }
  Expression out;
  expand_rec(w.indices, Coefficient::one(), {}, ctx, out);
  return out;
}

Diagram adjoint_trace_diagram(const TraceWord& w) {
  int n = int(w.indices.size());
  if (n < 2) throw WordTooShort("adjoint trace needs at least two letters");
  std::vector<VertexKind> kinds(n);
  switch (w.kind) {
    case TraceWord::Kind::AdjointD:
      kinds.assign(n, VertexKind::D);
      break;
    case TraceWord::Kind::AdjointF:
      kinds.assign(n, VertexKind::F);
      break;
    case TraceWord::Kind::Mixed:
      if (int(w.letter_kinds.size()) != n)
        throw std::invalid_argument("mixed word needs one kind per letter");
      kinds = w.letter_kinds;
      break;
    case TraceWord::Kind::Fundamental:
      throw std::invalid_argument("adjoint_trace_diagram needs an adjoint word");
  }
  DiagramAssembler a;
  for (int j = 0; j < n; ++j) a.add_vertex(kinds[j]);
  for (int j = 0; j < n; ++j) {
    a.link(a.slot(j, 0), a.external(w.indices[j]));
    a.link(a.slot(j, 2), a.slot((j + 1) % n, 1));
  }
  return a.finalize().diagram;
}

}  // namespace sunforest
