#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dtsim/compile.h"
#include "dtsim/error.h"
#include "dtsim/indep_test.h"
#include "dtsim/protogen.h"
#include "dtsim/random.h"
#include "dtsim/runtime.h"

namespace py = pybind11;

namespace dtsim {
namespace {

py::array_t<std::uint8_t> to_array(const BitMatrix& m) {
  py::array_t<std::uint8_t> a({m.rows(), m.cols()});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) w(r, c) = m.at(r, c);
  }
  return a;
}

BitMatrix from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::kWidthMismatch, "expected a 2-D array");
  const auto v = a.unchecked<2>();
  BitMatrix m(static_cast<std::size_t>(v.shape(0)), static_cast<std::size_t>(v.shape(1)));
  for (py::ssize_t r = 0; r < v.shape(0); ++r) {
    for (py::ssize_t c = 0; c < v.shape(1); ++c) {
      if (v(r, c) > 1) throw Error(ErrorKind::kNonBitValue, "array entries must be 0 or 1");
      m.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c), v(r, c) != 0);
    }
  }
  return m;
}

CompileOptions options(const std::string& framework, const std::optional<std::string>& mutation) {
  CompileOptions o;
  o.framework = parse_framework(framework);
  if (mutation) o.mutation = parse_mutation_spec(*mutation);
  return o;
}

TestConfig test_config(std::size_t iters, std::size_t train, std::size_t test, double alpha,
                       std::uint64_t seed, std::size_t threads) {
  TestConfig c;
  c.iters = iters;
  c.train_n = train;
  c.test_n = test;
  c.alpha = alpha;
  c.seed = seed;
  c.threads = threads;
  return c;
}

py::dict report(const TestReport& r) {
  py::list pairs;
  for (const ScorePair& p : r.pairs) pairs.append(py::make_tuple(p.real, p.ideal));
  py::dict d;
  d["pValue"] = r.p_value;
  d["verdict"] = to_string(r.verdict);
  d["pairs"] = pairs;
  d["wallSeconds"] = r.wall_seconds;
  return d;
}

}  // namespace
}  // namespace dtsim

PYBIND11_MODULE(_dtsim, m) {
  using namespace dtsim;
  m.doc() = "Choreography runtime, protocol compiler and insecurity test";

  py::register_exception<Error>(m, "DtsimError");

  m.def("normalize", [](const std::string& text) { return print_program(load_program(text)); },
        "Parse, expand macros, validate and pretty-print a program.");
  m.def("parties", [](const std::string& text) { return load_program(text).parties; });
  m.def(
      "compile_builtin",
      [](const std::string& name, const std::string& framework,
         const std::optional<std::string>& mutation) {
        return print_program(compile(builtin_circuit(name), options(framework, mutation)));
      },
      py::arg("name"), py::arg("framework") = "gmw", py::arg("mutation") = py::none());
  m.def(
      "compile_bristol",
      [](const std::string& text, const std::string& framework,
         const std::optional<std::string>& mutation) {
        return print_program(compile(parse_bristol(text), options(framework, mutation)));
      },
      py::arg("text"), py::arg("framework") = "gmw", py::arg("mutation") = py::none());
  m.def(
      "views",
      [](const std::string& text, std::size_t runs, const std::vector<PartyId>& corrupt,
         std::uint64_t seed) {
        const Executable exe(load_program(text));
        const TapeSet tapes = TapeSet::uniform(exe.shape(), runs, derive_seed(seed, {kTagTape}));
        const ViewTable v = extract_views(exe.run(tapes, runs), corrupt);
        py::dict d;
        d["L"] = to_array(v.labels);
        d["I"] = to_array(v.ideal);
        d["R"] = to_array(v.real_only);
        return d;
      },
      py::arg("text"), py::arg("runs"), py::arg("corrupt"), py::arg("seed") = 0,
      "Run a program `runs` times; same tapes as `dtsim run --seed`.");
  m.def(
      "test_program",
      [](const std::string& text, const std::vector<PartyId>& corrupt, std::size_t iters,
         std::size_t train, std::size_t test, double alpha, std::uint64_t seed,
         std::size_t threads) {
        const ProgramViewSource src(load_program(text), corrupt);
        TestReport r;
        {
          py::gil_scoped_release release;
          r = run_test(src, test_config(iters, train, test, alpha, seed, threads));
        }
        return report(r);
      },
      py::arg("text"), py::arg("corrupt"), py::arg("iters") = 100, py::arg("train") = 1024,
      py::arg("test") = 256, py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("threads") = 1);
  m.def(
      "test_views",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& labels,
         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& ideal,
         const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& real_only,
         std::size_t iters, std::size_t train, std::size_t test, double alpha) {
        const TableViewSource src(ViewTable{from_array(labels), from_array(ideal), from_array(real_only)});
        return report(run_test(src, test_config(iters, train, test, alpha, 0, 1)));
      },
      py::arg("L"), py::arg("I"), py::arg("R"), py::arg("iters") = 100, py::arg("train") = 1024,
      py::arg("test") = 256, py::arg("alpha") = 0.05);
  m.def(
      "generate",
      [](std::size_t parties, std::size_t secret_bits, std::size_t random_bits,
         std::size_t output_bits, std::size_t body_len, std::size_t max_width, std::uint64_t seed) {
        GenConfig c;
        c.parties = parties;
        c.secret_bits = secret_bits;
        c.random_bits = random_bits;
        c.output_bits = output_bits;
        c.body_len = body_len;
        c.max_width = max_width;
        c.seed = seed;
        return print_program(generate(c));
      },
      py::arg("parties") = 2, py::arg("secret_bits") = 16, py::arg("random_bits") = 48,
      py::arg("output_bits") = 16, py::arg("body_len") = 500, py::arg("max_width") = 3,
      py::arg("seed") = 0);
  m.def("wilcoxon_less", [](const std::vector<std::pair<double, double>>& pairs) {
    std::vector<ScorePair> p;
    for (const auto& [real, ideal] : pairs) p.push_back({real, ideal});
    return wilcoxon_less(p);
  });
}
