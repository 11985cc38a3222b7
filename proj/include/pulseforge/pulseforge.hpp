#pragma once

// Umbrella header for the pulse-level quantum programming toolkit.

#include "pulseforge/backend.hpp"
#include "pulseforge/channels.hpp"
#include "pulseforge/circuit.hpp"
#include "pulseforge/codegen.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/fidelity.hpp"
#include "pulseforge/hamiltonian.hpp"
#include "pulseforge/instructions.hpp"
#include "pulseforge/linalg.hpp"
#include "pulseforge/manifest.hpp"
#include "pulseforge/pauli_expr.hpp"
#include "pulseforge/pulses.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/random.hpp"
#include "pulseforge/readout.hpp"
#include "pulseforge/schedule.hpp"
#include "pulseforge/serialize.hpp"
#include "pulseforge/simulator.hpp"
#include "pulseforge/threads.hpp"
#include "pulseforge/tomography.hpp"
