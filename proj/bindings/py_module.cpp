#include <pybind11/pybind11.h>

#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <string>

#include "qf/bloom.hpp"
#include "qf/concurrent_qf.hpp"
#include "qf/expandable_qf.hpp"
#include "qf/lp_qf.hpp"
#include "qf/sequential_qf.hpp"

namespace py = pybind11;
using namespace qf;

namespace {

std::span<const std::byte> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

Fingerprint seq_fingerprint(const QuotientFilter& f, std::string_view key) {
  if (f.variant() == Variant::two_bit) {
    return make_nonzero_fingerprint(as_bytes(key), f.params());
  }
  return make_fingerprint(as_bytes(key), f.params());
}

template <class Filter>
py::bytes dump_to_bytes(const Filter& f) {
  std::ostringstream out(std::ios::binary);
  f.dump(out);
  return py::bytes(out.str());
}

}  // namespace

PYBIND11_MODULE(_qfilters, m) {
  m.doc() = "Quotient-filter approximate-membership structures";

  py::register_exception<FilterFullError>(m, "FilterFullError");

  py::class_<QuotientFilter>(m, "QuotientFilter")
      .def(py::init([](uint32_t quotient_bits, uint32_t remainder_bits,
                       bool two_bit, uint64_t seed) {
             FilterParams p{quotient_bits, remainder_bits, two_bit, seed};
             p.validate();
             return QuotientFilter(
                 p, two_bit ? Variant::two_bit : Variant::three_bit);
           }),
           py::arg("quotient_bits"), py::arg("remainder_bits"),
           py::arg("two_bit") = false, py::arg("seed") = kDefaultSeed)
      .def("insert",
           [](QuotientFilter& f, std::string_view key) {
             f.insert(seq_fingerprint(f, key));
           })
      .def("insert_int", &QuotientFilter::insert_key)
      .def("contains",
           [](const QuotientFilter& f, std::string_view key) {
             return f.contains(seq_fingerprint(f, key));
           })
      .def("contains_int", &QuotientFilter::contains_key)
      .def("__contains__",
           [](const QuotientFilter& f, std::string_view key) {
             return f.contains(seq_fingerprint(f, key));
           })
      .def("__len__", &QuotientFilter::size)
      .def("grow", &QuotientFilter::bounded_grow)
      .def("fpr_estimate", &QuotientFilter::fpr_estimate)
      .def_property_readonly("fill_degree", &QuotientFilter::fill_degree)
      .def_property_readonly(
          "quotient_bits",
          [](const QuotientFilter& f) { return f.params().quotient_bits; })
      .def_property_readonly(
          "remainder_bits",
          [](const QuotientFilter& f) { return f.params().remainder_bits; })
      .def("dumps", &dump_to_bytes<QuotientFilter>)
      .def_static("loads", [](py::bytes data) {
        std::istringstream in(std::string(data), std::ios::binary);
        return QuotientFilter::load(in);
      });

  py::class_<LinearProbingQF>(m, "LinearProbingQF")
      .def(py::init<uint32_t, uint32_t, uint64_t>(), py::arg("quotient_bits"),
           py::arg("remainder_bits"), py::arg("seed") = kDefaultSeed)
      .def("insert",
           [](LinearProbingQF& f, std::string_view key) {
             f.insert(f.fingerprint(as_bytes(key)));
           })
      .def("insert_int", &LinearProbingQF::insert_key)
      .def("contains",
           [](const LinearProbingQF& f, std::string_view key) {
             return f.contains(f.fingerprint(as_bytes(key)));
           })
      .def("contains_int", &LinearProbingQF::contains_key)
      .def("__contains__",
           [](const LinearProbingQF& f, std::string_view key) {
             return f.contains(f.fingerprint(as_bytes(key)));
           })
      .def("__len__", &LinearProbingQF::size)
      .def_property_readonly("fill_degree", &LinearProbingQF::fill_degree)
      .def_static("expected_fpr", &LinearProbingQF::expected_fpr,
                  py::arg("fill_degree"), py::arg("remainder_bits"))
      .def("dumps", &dump_to_bytes<LinearProbingQF>)
      .def_static("loads", [](py::bytes data) {
        std::istringstream in(std::string(data), std::ios::binary);
        return LinearProbingQF::load(in);
      });

  py::class_<ConcurrentQF>(m, "ConcurrentQF")
      .def(py::init([](uint32_t quotient_bits, uint32_t remainder_bits,
                       uint32_t max_quotient_bits, double grow_fill_degree,
                       uint64_t seed) {
             ConcurrentQFOptions o;
             o.max_quotient_bits = max_quotient_bits;
             o.grow_fill_degree = grow_fill_degree;
             o.seed = seed;
             return std::make_unique<ConcurrentQF>(quotient_bits,
                                                   remainder_bits, o);
           }),
           py::arg("quotient_bits"), py::arg("remainder_bits"),
           py::arg("max_quotient_bits") = 0,
           py::arg("grow_fill_degree") = 0.85, py::arg("seed") = kDefaultSeed)
      .def("insert",
           [](ConcurrentQF& f, std::string_view key) {
             f.insert(as_bytes(key));
           },
           py::call_guard<py::gil_scoped_release>())
      .def("insert_int", &ConcurrentQF::insert_key,
           py::call_guard<py::gil_scoped_release>())
      .def("contains",
           [](const ConcurrentQF& f, std::string_view key) {
             return f.contains(as_bytes(key));
           },
           py::call_guard<py::gil_scoped_release>())
      .def("contains_int", &ConcurrentQF::contains_key,
           py::call_guard<py::gil_scoped_release>())
      .def("__contains__",
           [](const ConcurrentQF& f, std::string_view key) {
             return f.contains(as_bytes(key));
           })
      .def("__len__", &ConcurrentQF::size)
      .def("grow", &ConcurrentQF::grow,
           py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("fill_degree", &ConcurrentQF::fill_degree)
      .def_property_readonly(
          "quotient_bits",
          [](const ConcurrentQF& f) { return f.params().quotient_bits; })
      .def_property_readonly(
          "remainder_bits",
          [](const ConcurrentQF& f) { return f.params().remainder_bits; })
      .def("snapshot", &ConcurrentQF::snapshot)
      .def("dumps", &dump_to_bytes<ConcurrentQF>);

  py::class_<ExpandableQF>(m, "ExpandableQF")
      .def(py::init([](uint64_t capacity, double target_fpr,
                       double grow_fill_degree, uint64_t seed) {
             ExpandableConfig c;
             c.min_capacity = capacity;
             c.target_fpr = target_fpr;
             c.grow_fill_degree = grow_fill_degree;
             c.seed = seed;
             return std::make_unique<ExpandableQF>(c);
           }),
           py::arg("capacity") = 1000, py::arg("target_fpr") = 1.0 / 1024.0,
           py::arg("grow_fill_degree") = 0.85, py::arg("seed") = kDefaultSeed)
      .def("insert",
           [](ExpandableQF& f, std::string_view key) {
             f.insert(as_bytes(key));
           },
           py::call_guard<py::gil_scoped_release>())
      .def("insert_int", &ExpandableQF::insert_key,
           py::call_guard<py::gil_scoped_release>())
      .def("insert_int_cascading", &ExpandableQF::insert_key_cascading,
           py::call_guard<py::gil_scoped_release>())
      .def("contains",
           [](const ExpandableQF& f, std::string_view key) {
             return f.contains(as_bytes(key));
           },
           py::call_guard<py::gil_scoped_release>())
      .def("contains_int", &ExpandableQF::contains_key,
           py::call_guard<py::gil_scoped_release>())
      .def("contains_int_early_abort", &ExpandableQF::contains_key_early_abort)
      .def("query_or_insert_int", &ExpandableQF::query_or_insert_key,
           py::call_guard<py::gil_scoped_release>())
      .def("__contains__",
           [](const ExpandableQF& f, std::string_view key) {
             return f.contains(as_bytes(key));
           })
      .def("__len__", &ExpandableQF::size)
      .def_property_readonly("num_levels", &ExpandableQF::num_levels)
      .def("fpr_bound",
           [](const ExpandableQF& f) {
             auto b = f.fpr_bound();
             return py::make_tuple(b.sum, b.limit);
           })
      .def("dumps", &dump_to_bytes<ExpandableQF>);

  py::class_<BloomFilter>(m, "BloomFilter")
      .def(py::init<uint64_t, uint64_t>(), py::arg("num_bits"),
           py::arg("seed") = kDefaultSeed)
      .def("insert",
           [](BloomFilter& f, std::string_view key) {
             f.insert_hash(hash_bytes(as_bytes(key), f.seed()));
           })
      .def("insert_int", &BloomFilter::insert_key)
      .def("contains",
           [](const BloomFilter& f, std::string_view key) {
             return f.contains_hash(hash_bytes(as_bytes(key), f.seed()));
           })
      .def("contains_int", &BloomFilter::contains_key)
      .def("__contains__",
           [](const BloomFilter& f, std::string_view key) {
             return f.contains_hash(hash_bytes(as_bytes(key), f.seed()));
           })
      .def("expected_fpr", &BloomFilter::expected_fpr, py::arg("num_elements"))
      .def_property_readonly("num_bits", &BloomFilter::num_bits);
}
