choice = UserInfo.retrieve(2);
send(choice);
