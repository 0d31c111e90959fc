#pragma once

#include "hdmitx/analog.hpp"
#include "hdmitx/channel.hpp"
#include "hdmitx/compliance.hpp"
#include "hdmitx/config.hpp"
#include "hdmitx/error.hpp"
#include "hdmitx/eye.hpp"
#include "hdmitx/kernel.hpp"
#include "hdmitx/logic.hpp"
#include "hdmitx/measure.hpp"
#include "hdmitx/mux.hpp"
#include "hdmitx/prbs.hpp"
#include "hdmitx/protocol.hpp"
#include "hdmitx/rational.hpp"
#include "hdmitx/reset.hpp"
#include "hdmitx/scenario.hpp"
#include "hdmitx/serializer.hpp"
#include "hdmitx/spectrum.hpp"
#include "hdmitx/stimulus.hpp"
#include "hdmitx/traces.hpp"
#include "hdmitx/vcd.hpp"
#include "hdmitx/word.hpp"
#include "hdmitx/selftest.hpp"
