class NegativeMatches {
  authenticate() {
    status = login(credentials);
    session_token = relogin(credentials);
  }
  renderChart() {
    print(surgeon_name);
    surgeon_name = fetchRecord(table);
  }
}
