#include <benchmark/benchmark.h>

#include "vigil/assembler.hpp"
#include "vigil/history.hpp"
#include "vigil/judgement.hpp"
#include "vigil/prop_code.hpp"
#include "vigil/trust.hpp"

using namespace vigil;

namespace {

const Program& counter_program() {
  static Program p = assemble(
      "LOADI r1, 1\n"
      "loop: ADD r0, r1\n"
      "STORE r0, 100\n"
      "JMP loop\n");
  return p;
}

void BM_Step(benchmark::State& state) {
  const Program& p = counter_program();
  VmState s;
  for (auto _ : state) {
    s = step(s, p);
    benchmark::DoNotOptimize(s.regs[0]);
  }
  state.SetItemsProcessed(int64_t(state.iterations()));
}
BENCHMARK(BM_Step);

void BM_StateDigest(benchmark::State& state) {
  VmState s;
  s.regs[0] = 42;
  for (auto _ : state) {
    Digest d = state_digest(s);
    benchmark::DoNotOptimize(d);
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(kStateBlobSize));
}
BENCHMARK(BM_StateDigest);

void BM_Sha256Throughput(benchmark::State& state) {
  std::string data(size_t(state.range(0)), 'x');
  for (auto _ : state) {
    Digest d = Sha256::of(data);
    benchmark::DoNotOptimize(d);
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Sha256Throughput)->Arg(64)->Arg(4096)->Arg(65536);

void BM_RecordSnapshot(benchmark::State& state) {
  const Program& p = counter_program();
  for (auto _ : state) {
    state.PauseTiming();
    HistoryStore store(p, {.capacity = 1 << 16, .checkpoint_stride = 1024});
    VmState s;
    state.ResumeTiming();
    for (int i = 0; i < 512; ++i) {
      store.record(s);
      s = step(s, p);
    }
    benchmark::DoNotOptimize(store.snapshot_count());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * 512);
}
BENCHMARK(BM_RecordSnapshot);

void BM_Reconstruct(benchmark::State& state) {
  const Program& p = counter_program();
  HistoryStore store(p, {.capacity = 1 << 16, .checkpoint_stride = 256});
  VmState s;
  store.record(s);
  for (int i = 0; i < 2047; ++i) {
    s = step(s, p);
    store.record(s);
  }
  uint64_t target = 2047;
  for (auto _ : state) {
    VmState rebuilt = store.reconstruct(target);
    benchmark::DoNotOptimize(rebuilt.tick);
  }
}
BENCHMARK(BM_Reconstruct);

void BM_ParseProp(benchmark::State& state) {
  const std::string text =
      "forall i in 0..7 . reg(i) <= 100 -> exists a in 0..15 . mem(a + i) != 0";
  for (auto _ : state) {
    Prop p = parse_prop(text);
    benchmark::DoNotOptimize(p.kind);
  }
}
BENCHMARK(BM_ParseProp);

void BM_Evaluate(benchmark::State& state) {
  Prop p = parse_prop("forall i in 0..7 . exists a in 0..15 . mem(a) = reg(i) | reg(i) < 16");
  VmState s;
  for (auto _ : state) {
    bool v = evaluate(p, s);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Evaluate);

void BM_EncodeDecode(benchmark::State& state) {
  Prop p = parse_prop("forall i in 0..7 . reg(i) * 3 + 1 <= mem(i) -> pc != 0");
  for (auto _ : state) {
    Prop q = decode(encode(p));
    benchmark::DoNotOptimize(q.kind);
  }
}
BENCHMARK(BM_EncodeDecode);

void BM_JudgementAppend(benchmark::State& state) {
  Prop p = parse_prop("reg(0) = 0");
  VmState s;
  for (auto _ : state) {
    state.PauseTiming();
    JudgementLog log;
    state.ResumeTiming();
    for (int i = 0; i < 64; ++i) {
      judge(log, uint64_t(i) + 1, "p", p, s);
    }
    benchmark::DoNotOptimize(log.records().back().entry_hash);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * 64);
}
BENCHMARK(BM_JudgementAppend);

void BM_PcrExtend(benchmark::State& state) {
  Digest m = measure("artifact");
  Pcr pcr;
  for (auto _ : state) {
    pcr.extend(m);
    benchmark::DoNotOptimize(pcr.value());
  }
}
BENCHMARK(BM_PcrExtend);

}  // namespace

BENCHMARK_MAIN();
