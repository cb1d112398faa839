full_name = retrieve(record_data,2);
isFemale = check(user_detail,'F');
first_name = UserInfo.get(2);
choice = match(name,list);
choice = UserInfo.retrieve(2);
AccountInfo.update(userId,index);
AccountInfo.update(index);
print(SSN);
