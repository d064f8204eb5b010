// Test double for the external-policy wire protocol. Answers every act
// request with the first legal action (or a misbehaviour selected by --mode).
#include <cstdio>
#include <iostream>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "CLI11.hpp"
#include "yle/external_policy.hpp"

int main(int argc, char** argv) {
  CLI::App app{"echo policy for the yle/1 protocol"};
  int port = -1;
  std::string mode = "first";
  std::string memory = "standard";
  std::string encoding = "graph";
  int delay_ms = 0;
  yle::EchoOptions options;
  app.add_option("--tcp", port, "listen on this TCP port (0 picks one) instead of stdio");
  app.add_option("--mode", mode, "first|uniform|illegal|garbage|slow|wrong-id");
  app.add_option("--protocol", options.protocol, "protocol version to announce");
  app.add_option("--memory", memory, "standard|perfect");
  app.add_option("--encoding", encoding, "graph|image");
  app.add_option("--delay-ms", delay_ms, "reply delay in slow mode");
  app.add_option("--seed", options.seed, "seed for uniform and garbage modes");
  CLI11_PARSE(app, argc, argv);

  try {
    options.mode = yle::parse_echo_mode(mode);
    options.observation = {yle::parse_memory_mode(memory), yle::parse_encoding(encoding)};
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  options.delay = std::chrono::milliseconds(delay_ms);

  if (port < 0) {
    yle::serve_echo_policy(STDIN_FILENO, STDOUT_FILENO, options);
    return 0;
  }
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 8) != 0) {
    std::perror("listen");
    return 1;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  std::printf("listening %d\n", ntohs(addr.sin_port));
  std::fflush(stdout);
  for (;;) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    yle::serve_echo_policy(fd, fd, options);
    ::close(fd);
  }
}
