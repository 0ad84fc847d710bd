#include <pybind11/pybind11.h>
PYBIND11_MODULE(_sprlab, m) { m.doc() = "placeholder"; }
