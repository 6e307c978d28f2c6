// Copyright 2026 The telesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Alice-to-Bob classical channel. A message is one byte on the wire: the low
// two bits carry the detector code, the high six bits are zero.

#pragma once

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <deque>
#include <stdexcept>
#include <string>
#include <system_error>

namespace telesim {

class ClassicalMessage {
 public:
  explicit ClassicalMessage(std::uint8_t code) : code_(code) {
    if (code > 3) throw std::out_of_range("ClassicalMessage: code must be in 0..3");
  }
  std::uint8_t code() const { return code_; }
  friend bool operator==(ClassicalMessage, ClassicalMessage) = default;

 private:
  std::uint8_t code_;
};

inline std::uint8_t to_wire(ClassicalMessage m) { return m.code(); }

inline ClassicalMessage from_wire(std::uint8_t byte) {
  if ((byte & 0xFCu) != 0)
    throw std::invalid_argument("from_wire: high bits set in message byte " + std::to_string(byte));
  return ClassicalMessage(byte);
}

class ClassicalChannel {
 public:
  virtual ~ClassicalChannel() = default;
  virtual void send(ClassicalMessage m) = 0;
  virtual ClassicalMessage receive() = 0;
};

class InProcessChannel final : public ClassicalChannel {
 public:
  void send(ClassicalMessage m) override { queue_.push_back(to_wire(m)); }
  ClassicalMessage receive() override {
    if (queue_.empty()) throw std::runtime_error("InProcessChannel: no message pending");
    const auto b = queue_.front();
    queue_.pop_front();
    return from_wire(b);
  }

 private:
  std::deque<std::uint8_t> queue_;
};

// Connected local socket pair; Alice writes one end, Bob reads the other.
class SocketPairChannel final : public ClassicalChannel {
 public:
  SocketPairChannel() {
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds_) != 0)
      throw std::system_error(errno, std::generic_category(), "socketpair");
  }
  ~SocketPairChannel() override {
    ::close(fds_[0]);
    ::close(fds_[1]);
  }
  SocketPairChannel(const SocketPairChannel&) = delete;
  SocketPairChannel& operator=(const SocketPairChannel&) = delete;

  void send(ClassicalMessage m) override { write_byte(to_wire(m)); }

  ClassicalMessage receive() override { return from_wire(read_byte()); }

  /// Raw write on Alice's end, bypassing message validation.
  void write_byte(std::uint8_t b) {
    ssize_t n;
    do {
      n = ::write(fds_[0], &b, 1);
    } while (n < 0 && errno == EINTR);
    if (n != 1) throw std::system_error(errno, std::generic_category(), "channel write");
  }

 private:
  std::uint8_t read_byte() {
    std::uint8_t b = 0;
    ssize_t n;
    do {
      n = ::read(fds_[1], &b, 1);
    } while (n < 0 && errno == EINTR);
    if (n != 1) throw std::system_error(errno, std::generic_category(), "channel read");
    return b;
  }

  int fds_[2] = {-1, -1};
};

}  // namespace telesim
