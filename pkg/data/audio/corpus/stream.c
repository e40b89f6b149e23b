/* Audio streaming server excerpt: one function per optional feature. */

#ifdef Encrypt
void encrypt(payload_t *payload) {
  scramble(payload->data, payload->len);
}
#endif

#ifdef AddMetadata
void add_meatadata(packet_t *packet) {
  metadata_t *matadata = build_metadata(packet);
#ifdef Encrypt
  encrypt(matadata);
#endif
  attach(packet, matadata);
}
#endif

#ifdef LogIP
void log(char *ip) {
  entry_t *log_entry = format_entry(ip);
#ifdef Encrypt
  encrypt(log_entry);
#endif
  write_entry(log_entry);
}
#endif

#ifdef Compress
void compress(payload_t *payload) {
  deflate(payload->data, payload->len);
}
#endif

#ifdef Rank
void rank() {
  sort_streams();
}
#endif
