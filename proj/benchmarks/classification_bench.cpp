#include <benchmark/benchmark.h>

#include "gazepriv/classification.hpp"
#include "gazepriv/interaction.hpp"
#include "gazepriv/synthetic.hpp"

using namespace gazepriv;

namespace {

const Recording& recording() {
  static const Recording rec = [] {
    synth::SubjectRecordingSpec spec;
    spec.duration_ms = 60000.0;
    return synth::subject_recording(synth::SubjectProfile{}, spec, "1", "1");
  }();
  return rec;
}

}  // namespace

static void BM_Idt(benchmark::State& state) {
  const auto& rec = recording();
  for (auto _ : state) benchmark::DoNotOptimize(idt_classify(rec));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rec.samples.size()));
}
BENCHMARK(BM_Idt);

static void BM_Ikf(benchmark::State& state) {
  const auto& rec = recording();
  for (auto _ : state) benchmark::DoNotOptimize(ikf_classify(rec));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rec.samples.size()));
}
BENCHMARK(BM_Ikf);

static void BM_SimulateInteractions(benchmark::State& state) {
  const auto& rec = recording();
  const auto cls = idt_classify(rec);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_interactions(rec, cls));
}
BENCHMARK(BM_SimulateInteractions);
